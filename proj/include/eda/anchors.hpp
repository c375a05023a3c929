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

#ifndef EDA__ANCHORS_HPP_
#define EDA__ANCHORS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eda/types.hpp"

namespace eda
{

/// When anchors evolve across an L-layer decoder. evolve_after_layers
/// holds the 1-based layer indices whose outputs become the anchors of
/// every later layer up to the next entry. Empty list = static anchors.
struct EvolveSchedule
{
  int num_layers = 6;
  std::vector<int> evolve_after_layers;

  int evolve_times() const { return static_cast<int>(evolve_after_layers.size()); }
};

std::optional<std::string> validate(const EvolveSchedule & schedule);

/// The standard schedules for a 6-layer decoder, keyed by evolve count:
/// 0 -> {}, 1 -> {3}, 2 -> {2, 4}, 5 -> {1, 2, 3, 4, 5}.
EvolveSchedule standard_schedule(int evolve_times, int num_layers = 6);

struct KMeansResult
{
  std::vector<Point2> centroids;
  std::vector<int> assignment;
  double objective = 0.0;  // sum of squared point-to-centroid distances
  std::vector<double> objective_history;
  int iterations = 0;
};

/// k-means++ seeding, deterministic for a given seed.
std::vector<Point2> kmeans_plus_plus_init(
  const std::vector<Point2> & points, int k, std::uint64_t seed);

/// Lloyd iterations from the given initial centroids. Empty clusters are
/// re-seeded to the point currently farthest from its own centroid.
/// Stops when assignments are stable or after max_iters.
KMeansResult lloyd(
  const std::vector<Point2> & points, std::vector<Point2> initial_centroids, int max_iters);

/// k-means over ground-truth endpoints: k-means++ init then Lloyd.
/// Requires at least k distinct points.
KMeansResult kmeans_endpoints(
  const std::vector<Point2> & gt_endpoints, int k, std::uint64_t seed, int max_iters = 100);

AnchorSet predefined_anchor_set(const std::vector<Point2> & endpoints);

/// Anchors seen by layer `layer_index` (1-based) under the schedule:
/// the predefined set until the first evolve point, then the mean
/// trajectories of the most recent evolved-from layer's output.
AnchorSet anchors_for_layer(
  int layer_index, const AnchorSet & predefined,
  const std::vector<MixtureOutput> & layer_outputs, const EvolveSchedule & schedule);

/// Distinct-anchor selection: greedy NMS over anchor endpoints ordered
/// by the layer's score logits. True = anchor survives and its
/// component may be positive or negative; false = neutral.
std::vector<bool> select_distinct(
  const AnchorSet & anchors, const std::vector<double> & score_logits, double sigma);

}  // namespace eda

#endif  // EDA__ANCHORS_HPP_
