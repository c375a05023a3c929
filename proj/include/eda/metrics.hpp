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

#ifndef EDA__METRICS_HPP_
#define EDA__METRICS_HPP_

#include <vector>

#include "eda/geometry.hpp"
#include "eda/types.hpp"

namespace eda
{

enum class ScoreMode { kOriginal, kScaled, kRank };

struct EvalConfig
{
  int top_k = 6;
  double miss_threshold = 2.0;
  LengthMode length_mode = LengthMode::kArcLength;
};

/// The K retained predictions of one scene, scores descending.
/// Scores are sigmoid probabilities of the source logits.
struct SelectedPredictions
{
  std::vector<Trajectory> trajectories;
  std::vector<double> scores;
  double sigma = 0.0;  // NMS threshold used for the selection

  int size() const { return static_cast<int>(trajectories.size()); }
};

struct SceneDetail
{
  int scene = 0;
  double min_ade = 0.0;
  double min_fde = 0.0;
  bool miss = false;
};

struct MetricsBundle
{
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
  double map_original = 0.0;
  double map_scaled = 0.0;
  double map_rank = 0.0;
  std::vector<SceneDetail> details;
};

/// Top-K selection by greedy endpoint NMS, sigma from nms_threshold of
/// the top-scored trajectory's length. When fewer than K survive, the
/// best-scored suppressed components back-fill; the result is reordered
/// so scores stay descending.
SelectedPredictions select_top_k(
  const MixtureOutput & output, int k, LengthMode length_mode = LengthMode::kArcLength);

/// original: identity. scaled: divide by the sum (requires sum > 0).
/// rank: add (K - rank), rank 1 = highest score.
std::vector<double> score_transform(const std::vector<double> & scores, ScoreMode mode);

double min_ade(const SelectedPredictions & selected, const Trajectory & gt);
double min_fde(const SelectedPredictions & selected, const Trajectory & gt);
bool is_miss(const SelectedPredictions & selected, const Trajectory & gt, double miss_threshold);

/// Single-bucket interpolated average precision over all scenes' pooled
/// predictions. Per scene at most one true positive: its
/// highest-transformed-score prediction whose endpoint error is within
/// the miss threshold. Pool sorting ties break by scene then rank.
double average_precision(
  const std::vector<SelectedPredictions> & selections, const std::vector<Trajectory> & gts,
  ScoreMode mode, double miss_threshold);

/// All headline metrics over one evaluation set.
MetricsBundle compute_metrics(
  const std::vector<SelectedPredictions> & selections, const std::vector<Trajectory> & gts,
  double miss_threshold);

}  // namespace eda

#endif  // EDA__METRICS_HPP_
