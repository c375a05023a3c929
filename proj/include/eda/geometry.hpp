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

#ifndef EDA__GEOMETRY_HPP_
#define EDA__GEOMETRY_HPP_

#include <map>
#include <vector>

#include "eda/types.hpp"

namespace eda
{

/// Result of greedy NMS over scored endpoints. kept is ordered by
/// descending score; every suppressed index maps to the kept index that
/// suppressed it (its nearest kept endpoint at suppression time).
struct NmsKeepList
{
  std::vector<int> kept;
  std::map<int, int> suppressed_by;
};

double euclidean(const Point2 & a, const Point2 & b);

/// Distance between final points.
double endpoint_distance(const Point2 & a, const Point2 & b);
double endpoint_distance(const Trajectory & a, const Trajectory & b);

/// Mean over steps of the per-step Euclidean distance. Horizons must match.
double mean_pointwise_distance(const Trajectory & a, const Trajectory & b);

enum class LengthMode
{
  kArcLength,     // sum of consecutive waypoint segment lengths
  kDisplacement,  // straight-line first-to-last distance
};

double trajectory_length(const Trajectory & trajectory, LengthMode mode = LengthMode::kArcLength);

/// Adaptive NMS distance threshold, scaled with the length L of the
/// highest-confidence trajectory and clamped to [2.5, 3.5]:
///   sigma = min(3.5, max(2.5, 2.5 + 1.5 * (L - 10) / (50 - 10)))
double nms_threshold(double top_trajectory_length);

/// Greedy NMS: visit indices by descending score (ties -> lower index
/// first); keep an index iff it is farther than sigma from every kept
/// endpoint, otherwise record the nearest kept endpoint as suppressor
/// (distance ties -> lowest kept index).
NmsKeepList greedy_nms(
  const std::vector<Point2> & endpoints, const std::vector<double> & scores, double sigma);

/// Visit order used by greedy_nms: descending score, ties toward the
/// lower index.
std::vector<int> score_order(const std::vector<double> & scores);

}  // namespace eda

#endif  // EDA__GEOMETRY_HPP_
