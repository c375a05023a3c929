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

#include "eda/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eda
{

double euclidean(const Point2 & a, const Point2 & b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

double endpoint_distance(const Point2 & a, const Point2 & b)
{
  return euclidean(a, b);
}

double endpoint_distance(const Trajectory & a, const Trajectory & b)
{
  return euclidean(a.endpoint(), b.endpoint());
}

double mean_pointwise_distance(const Trajectory & a, const Trajectory & b)
{
  if (a.horizon() != b.horizon()) {
    throw std::invalid_argument("mean_pointwise_distance: trajectory length mismatch");
  }
  double sum = 0.0;
  for (int t = 0; t < a.horizon(); ++t) {
    sum += euclidean(a.points[t], b.points[t]);
  }
  return sum / static_cast<double>(a.horizon());
}

double trajectory_length(const Trajectory & trajectory, LengthMode mode)
{
  if (mode == LengthMode::kDisplacement) {
    return euclidean(trajectory.points.front(), trajectory.points.back());
  }
  double sum = 0.0;
  for (int t = 1; t < trajectory.horizon(); ++t) {
    sum += euclidean(trajectory.points[t - 1], trajectory.points[t]);
  }
  return sum;
}

double nms_threshold(double top_trajectory_length)
{
  const double scaled = 2.5 + 1.5 * (top_trajectory_length - 10.0) / (50.0 - 10.0);
  return std::min(3.5, std::max(2.5, scaled));
}

std::vector<int> score_order(const std::vector<double> & scores)
{
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&scores](int a, int b) {
    if (scores[a] != scores[b]) {
      return scores[a] > scores[b];
    }
    return a < b;
  });
  return order;
}

NmsKeepList greedy_nms(
  const std::vector<Point2> & endpoints, const std::vector<double> & scores, double sigma)
{
  if (endpoints.empty()) {
    throw std::invalid_argument("greedy_nms: empty input");
  }
  if (endpoints.size() != scores.size()) {
    throw std::invalid_argument("greedy_nms: endpoints/scores length mismatch");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("greedy_nms: sigma must be positive");
  }

  NmsKeepList result;
  for (int idx : score_order(scores)) {
    int suppressor = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int kept_idx : result.kept) {
      const double d = euclidean(endpoints[idx], endpoints[kept_idx]);
      if (d > sigma) {
        continue;
      }
      if (d < best || (d == best && kept_idx < suppressor)) {
        best = d;
        suppressor = kept_idx;
      }
    }
    if (suppressor < 0) {
      result.kept.push_back(idx);
    } else {
      result.suppressed_by[idx] = suppressor;
    }
  }
  return result;
}

}  // namespace eda
