// Copyright 2026 The EDA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eda/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eda
{
namespace
{

double sigmoid(double x)
{
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

SelectedPredictions select_top_k(const MixtureOutput & output, int k, LengthMode length_mode)
{
  const int n = output.num_components();
  if (k < 1) {
    throw std::invalid_argument("select_top_k: k must be >= 1");
  }
  if (k > n) {
    throw std::invalid_argument("select_top_k: k exceeds the number of components");
  }

  std::vector<Point2> endpoints(n);
  for (int i = 0; i < n; ++i) {
    endpoints[i] = {output.components[i].steps.back().mu_x,
                    output.components[i].steps.back().mu_y};
  }
  const int top = score_order(output.score_logits).front();
  const double sigma =
    nms_threshold(trajectory_length(mean_trajectory(output.components[top], output.dt),
                                    length_mode));
  const NmsKeepList keep = greedy_nms(endpoints, output.score_logits, sigma);

  std::vector<int> chosen;
  chosen.reserve(k);
  for (int idx : keep.kept) {
    if (static_cast<int>(chosen.size()) == k) {
      break;
    }
    chosen.push_back(idx);
  }
  if (static_cast<int>(chosen.size()) < k) {
    // Back-fill with the best-scored suppressed components.
    for (int idx : score_order(output.score_logits)) {
      if (static_cast<int>(chosen.size()) == k) {
        break;
      }
      if (keep.suppressed_by.count(idx) > 0) {
        chosen.push_back(idx);
      }
    }
  }
  // Keep the descending-score invariant after back-fill.
  std::sort(chosen.begin(), chosen.end(), [&output](int a, int b) {
    if (output.score_logits[a] != output.score_logits[b]) {
      return output.score_logits[a] > output.score_logits[b];
    }
    return a < b;
  });

  SelectedPredictions selected;
  selected.sigma = sigma;
  selected.trajectories.reserve(k);
  selected.scores.reserve(k);
  for (int idx : chosen) {
    selected.trajectories.push_back(mean_trajectory(output.components[idx], output.dt));
    selected.scores.push_back(sigmoid(output.score_logits[idx]));
  }
  return selected;
}

std::vector<double> score_transform(const std::vector<double> & scores, ScoreMode mode)
{
  const int k = static_cast<int>(scores.size());
  std::vector<double> out(scores);
  switch (mode) {
    case ScoreMode::kOriginal:
      break;
    case ScoreMode::kScaled: {
      double sum = 0.0;
      for (double s : scores) {
        sum += s;
      }
      if (!(sum > 0.0)) {
        throw std::invalid_argument("score_transform: zero score sum in scaled mode");
      }
      for (double & s : out) {
        s /= sum;
      }
      break;
    }
    case ScoreMode::kRank:
      // Scores arrive descending; rank 1 gets +(K-1), last gets +0.
      for (int rank = 0; rank < k; ++rank) {
        out[rank] += static_cast<double>(k - 1 - rank);
      }
      break;
  }
  return out;
}

double min_ade(const SelectedPredictions & selected, const Trajectory & gt)
{
  double best = std::numeric_limits<double>::infinity();
  for (const Trajectory & trajectory : selected.trajectories) {
    best = std::min(best, mean_pointwise_distance(trajectory, gt));
  }
  return best;
}

double min_fde(const SelectedPredictions & selected, const Trajectory & gt)
{
  double best = std::numeric_limits<double>::infinity();
  for (const Trajectory & trajectory : selected.trajectories) {
    best = std::min(best, endpoint_distance(trajectory, gt));
  }
  return best;
}

bool is_miss(const SelectedPredictions & selected, const Trajectory & gt, double miss_threshold)
{
  return min_fde(selected, gt) > miss_threshold;
}

double average_precision(
  const std::vector<SelectedPredictions> & selections, const std::vector<Trajectory> & gts,
  ScoreMode mode, double miss_threshold)
{
  if (selections.empty() || selections.size() != gts.size()) {
    throw std::invalid_argument("average_precision: needs aligned, non-empty inputs");
  }
  const int num_scenes = static_cast<int>(selections.size());

  struct PooledPrediction
  {
    double score = 0.0;
    int scene = 0;
    int rank = 0;
    bool true_positive = false;
  };
  std::vector<PooledPrediction> pool;

  for (int s = 0; s < num_scenes; ++s) {
    const SelectedPredictions & selected = selections[s];
    const std::vector<double> transformed = score_transform(selected.scores, mode);
    // The scene's true positive: highest transformed score among hits.
    int tp_rank = -1;
    double tp_score = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < selected.size(); ++r) {
      const double error = endpoint_distance(selected.trajectories[r], gts[s]);
      if (error <= miss_threshold && transformed[r] > tp_score) {
        tp_score = transformed[r];
        tp_rank = r;
      }
    }
    for (int r = 0; r < selected.size(); ++r) {
      pool.push_back({transformed[r], s, r, r == tp_rank});
    }
  }

  std::sort(pool.begin(), pool.end(), [](const PooledPrediction & a, const PooledPrediction & b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    if (a.scene != b.scene) {
      return a.scene < b.scene;
    }
    return a.rank < b.rank;
  });

  std::vector<double> precision(pool.size());
  std::vector<double> recall(pool.size());
  int tp = 0;
  int fp = 0;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    pool[j].true_positive ? ++tp : ++fp;
    precision[j] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall[j] = static_cast<double>(tp) / static_cast<double>(num_scenes);
  }
  // Precision envelope from the right, integrated over recall steps.
  double ap = 0.0;
  double envelope = 0.0;
  for (std::size_t j = pool.size(); j-- > 0;) {
    envelope = std::max(envelope, precision[j]);
    const double previous_recall = (j == 0) ? 0.0 : recall[j - 1];
    if (recall[j] > previous_recall) {
      ap += (recall[j] - previous_recall) * envelope;
    }
  }
  return ap;
}

MetricsBundle compute_metrics(
  const std::vector<SelectedPredictions> & selections, const std::vector<Trajectory> & gts,
  double miss_threshold)
{
  if (selections.empty() || selections.size() != gts.size()) {
    throw std::invalid_argument("compute_metrics: needs aligned, non-empty inputs");
  }
  MetricsBundle bundle;
  const int num_scenes = static_cast<int>(selections.size());
  bundle.details.resize(num_scenes);
  for (int s = 0; s < num_scenes; ++s) {
    SceneDetail & detail = bundle.details[s];
    detail.scene = s;
    detail.min_ade = min_ade(selections[s], gts[s]);
    detail.min_fde = min_fde(selections[s], gts[s]);
    detail.miss = detail.min_fde > miss_threshold;
    bundle.min_ade += detail.min_ade;
    bundle.min_fde += detail.min_fde;
    bundle.miss_rate += detail.miss ? 1.0 : 0.0;
  }
  bundle.min_ade /= num_scenes;
  bundle.min_fde /= num_scenes;
  bundle.miss_rate /= num_scenes;
  bundle.map_original = average_precision(selections, gts, ScoreMode::kOriginal, miss_threshold);
  bundle.map_scaled = average_precision(selections, gts, ScoreMode::kScaled, miss_threshold);
  bundle.map_rank = average_precision(selections, gts, ScoreMode::kRank, miss_threshold);
  return bundle;
}

}  // namespace eda
