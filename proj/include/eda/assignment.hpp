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

#ifndef EDA__ASSIGNMENT_HPP_
#define EDA__ASSIGNMENT_HPP_

#include <vector>

#include "eda/types.hpp"

namespace eda
{

/// Anchor-to-ground-truth distance: endpoint distance for predefined
/// anchors, mean pointwise distance over the full trajectory for
/// evolved ones.
double anchor_distance(const Anchor & anchor, const Trajectory & gt);

/// Positive component = the one whose mean trajectory is closest to the
/// ground truth (mean pointwise distance, ties -> lower index). All
/// components stay positive or negative; the mask is all-true.
MatchResult match_prediction_based(const MixtureOutput & output, const Trajectory & gt);

/// Positive component = the one whose predefined anchor endpoint is
/// closest to the ground-truth endpoint. Requires all-predefined
/// anchors; the mask is all-true.
MatchResult match_anchor_based(const AnchorSet & anchors, const Trajectory & gt);

/// Positive component = argmin of anchor_distance over the distinct
/// subset; masked-out entries get +inf distance and become neutral.
MatchResult match_eda(
  const AnchorSet & anchors, const std::vector<bool> & distinct_mask, const Trajectory & gt);

}  // namespace eda

#endif  // EDA__ASSIGNMENT_HPP_
