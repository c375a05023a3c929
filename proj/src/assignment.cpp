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

#include "eda/assignment.hpp"

#include <limits>
#include <stdexcept>

#include "eda/geometry.hpp"

namespace eda
{
namespace
{

MatchResult from_distances(std::vector<double> distances, std::vector<bool> mask)
{
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(distances.size()); ++i) {
    if (mask[i] && distances[i] < best_d) {
      best_d = distances[i];
      best = i;
    }
  }
  if (best < 0) {
    throw std::invalid_argument("matching: distinct mask has no true entry");
  }
  MatchResult result;
  result.positive_index = best;
  result.distinct_mask = std::move(mask);
  result.distances = std::move(distances);
  return result;
}

}  // namespace

double anchor_distance(const Anchor & anchor, const Trajectory & gt)
{
  if (anchor.provenance == AnchorProvenance::kPredefined) {
    return endpoint_distance(anchor.endpoint, gt.endpoint());
  }
  if (!anchor.full_trajectory.has_value()) {
    throw std::invalid_argument("anchor_distance: evolved anchor missing its trajectory");
  }
  return mean_pointwise_distance(*anchor.full_trajectory, gt);
}

MatchResult match_prediction_based(const MixtureOutput & output, const Trajectory & gt)
{
  const int n = output.num_components();
  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i) {
    distances[i] = mean_pointwise_distance(mean_trajectory(output.components[i], output.dt), gt);
  }
  return from_distances(std::move(distances), std::vector<bool>(n, true));
}

MatchResult match_anchor_based(const AnchorSet & anchors, const Trajectory & gt)
{
  const int n = anchors.size();
  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i) {
    const Anchor & anchor = anchors.anchors[i];
    if (anchor.provenance != AnchorProvenance::kPredefined) {
      throw std::invalid_argument("match_anchor_based: anchor " + std::to_string(i) +
                                  " is not predefined");
    }
    distances[i] = endpoint_distance(anchor.endpoint, gt.endpoint());
  }
  return from_distances(std::move(distances), std::vector<bool>(n, true));
}

MatchResult match_eda(
  const AnchorSet & anchors, const std::vector<bool> & distinct_mask, const Trajectory & gt)
{
  const int n = anchors.size();
  if (static_cast<int>(distinct_mask.size()) != n) {
    throw std::invalid_argument("match_eda: mask/anchors length mismatch");
  }
  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i) {
    distances[i] = distinct_mask[i] ? anchor_distance(anchors.anchors[i], gt)
                                    : std::numeric_limits<double>::infinity();
  }
  return from_distances(std::move(distances), distinct_mask);
}

}  // namespace eda
