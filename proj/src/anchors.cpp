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

#include "eda/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "eda/geometry.hpp"
#include "eda/rng.hpp"

namespace eda
{
namespace
{

double squared_distance(const Point2 & a, const Point2 & b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

int nearest_centroid(const Point2 & p, const std::vector<Point2> & centroids)
{
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(centroids.size()); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

int count_distinct(const std::vector<Point2> & points)
{
  std::set<std::pair<double, double>> unique;
  for (const auto & p : points) {
    unique.insert({p.x, p.y});
  }
  return static_cast<int>(unique.size());
}

}  // namespace

std::optional<std::string> validate(const EvolveSchedule & schedule)
{
  if (schedule.num_layers < 1) {
    return "schedule needs at least one layer";
  }
  int previous = 0;
  for (int layer : schedule.evolve_after_layers) {
    if (layer < 1) {
      return "evolve layers are 1-based";
    }
    if (layer <= previous) {
      return "evolve layers must be strictly increasing";
    }
    if (layer >= schedule.num_layers) {
      return "evolving after the final layer is useless";
    }
    previous = layer;
  }
  return std::nullopt;
}

EvolveSchedule standard_schedule(int evolve_times, int num_layers)
{
  EvolveSchedule schedule;
  schedule.num_layers = num_layers;
  switch (evolve_times) {
    case 0:
      break;
    case 1:
      schedule.evolve_after_layers = {3};
      break;
    case 2:
      schedule.evolve_after_layers = {2, 4};
      break;
    case 5:
      schedule.evolve_after_layers = {1, 2, 3, 4, 5};
      break;
    default:
      throw std::invalid_argument(
        "standard_schedule: evolve_times must be one of 0, 1, 2, 5");
  }
  if (auto err = validate(schedule)) {
    throw std::invalid_argument("standard_schedule: " + *err);
  }
  return schedule;
}

std::vector<Point2> kmeans_plus_plus_init(
  const std::vector<Point2> & points, int k, std::uint64_t seed)
{
  Rng rng(splitmix64(seed));
  std::vector<Point2> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.below(static_cast<int>(points.size()))]);

  std::vector<double> d2(points.size());
  while (static_cast<int>(centroids.size()) < k) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto & c : centroids) {
        best = std::min(best, squared_distance(points[i], c));
      }
      d2[i] = best;
    }
    double total = 0.0;
    for (double v : d2) {
      total += v;
    }
    if (total <= 0.0) {
      // All remaining points coincide with chosen centroids; the caller
      // guarantees enough distinct points, so this only happens with
      // duplicates left over. Fall back to uniform choice.
      centroids.push_back(points[rng.below(static_cast<int>(points.size()))]);
      continue;
    }
    centroids.push_back(points[rng.categorical(d2)]);
  }
  return centroids;
}

KMeansResult lloyd(
  const std::vector<Point2> & points, std::vector<Point2> initial_centroids, int max_iters)
{
  const int n = static_cast<int>(points.size());
  const int k = static_cast<int>(initial_centroids.size());

  KMeansResult result;
  result.centroids = std::move(initial_centroids);
  result.assignment.assign(n, -1);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment step.
    bool changed = false;
    double objective = 0.0;
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(points[i], result.centroids);
      objective += squared_distance(points[i], result.centroids[c]);
      if (c != result.assignment[i]) {
        result.assignment[i] = c;
        changed = true;
      }
    }
    result.objective = objective;
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (!changed) {
      break;
    }

    // Update step.
    std::vector<double> sum_x(k, 0.0), sum_y(k, 0.0);
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      sum_x[result.assignment[i]] += points[i].x;
      sum_y[result.assignment[i]] += points[i].y;
      ++count[result.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        result.centroids[c] = {sum_x[c] / count[c], sum_y[c] / count[c]};
      }
    }
    // Re-seed empty clusters to the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        continue;
      }
      int farthest = 0;
      double farthest_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const double d = squared_distance(points[i], result.centroids[result.assignment[i]]);
        if (d > farthest_d) {
          farthest_d = d;
          farthest = i;
        }
      }
      result.centroids[c] = points[farthest];
    }
  }
  return result;
}

KMeansResult kmeans_endpoints(
  const std::vector<Point2> & gt_endpoints, int k, std::uint64_t seed, int max_iters)
{
  if (k < 1) {
    throw std::invalid_argument("kmeans_endpoints: k must be >= 1");
  }
  if (count_distinct(gt_endpoints) < k) {
    throw std::invalid_argument("kmeans_endpoints: fewer than k distinct points");
  }
  return lloyd(gt_endpoints, kmeans_plus_plus_init(gt_endpoints, k, seed), max_iters);
}

AnchorSet predefined_anchor_set(const std::vector<Point2> & endpoints)
{
  AnchorSet set;
  set.anchors.reserve(endpoints.size());
  for (const auto & p : endpoints) {
    set.anchors.push_back(Anchor::predefined(p));
  }
  return set;
}

AnchorSet anchors_for_layer(
  int layer_index, const AnchorSet & predefined,
  const std::vector<MixtureOutput> & layer_outputs, const EvolveSchedule & schedule)
{
  if (auto err = validate(schedule)) {
    throw std::invalid_argument("anchors_for_layer: " + *err);
  }
  if (layer_index < 1 || layer_index > schedule.num_layers) {
    throw std::invalid_argument("anchors_for_layer: layer index out of range");
  }

  int source_layer = 0;  // 0 = predefined
  for (int evolve_layer : schedule.evolve_after_layers) {
    if (evolve_layer < layer_index) {
      source_layer = evolve_layer;
    }
  }
  if (source_layer == 0) {
    return predefined;
  }
  if (static_cast<int>(layer_outputs.size()) < source_layer) {
    throw std::invalid_argument(
      "anchors_for_layer: missing output of layer " + std::to_string(source_layer));
  }

  const MixtureOutput & source = layer_outputs[source_layer - 1];
  AnchorSet evolved;
  evolved.anchors.reserve(source.components.size());
  for (const auto & component : source.components) {
    evolved.anchors.push_back(
      Anchor::evolved(mean_trajectory(component, source.dt), source_layer));
  }
  return evolved;
}

std::vector<bool> select_distinct(
  const AnchorSet & anchors, const std::vector<double> & score_logits, double sigma)
{
  if (anchors.size() != static_cast<int>(score_logits.size())) {
    throw std::invalid_argument("select_distinct: anchors/scores length mismatch");
  }
  std::vector<Point2> endpoints;
  endpoints.reserve(anchors.size());
  for (const auto & anchor : anchors.anchors) {
    endpoints.push_back(anchor.endpoint);
  }
  const NmsKeepList keep = greedy_nms(endpoints, score_logits, sigma);
  std::vector<bool> mask(anchors.size(), false);
  for (int idx : keep.kept) {
    mask[idx] = true;
  }
  return mask;
}

}  // namespace eda
