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

#include "eda/types.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace eda
{
namespace
{

std::string at_step(const char * what, int step)
{
  return std::string(what) + " at step " + std::to_string(step);
}

}  // namespace

Trajectory mean_trajectory(const GaussianTrajectory & component, double dt)
{
  Trajectory out;
  out.dt = dt;
  out.points.reserve(component.steps.size());
  for (const auto & s : component.steps) {
    out.points.push_back({s.mu_x, s.mu_y});
  }
  return out;
}

Anchor Anchor::predefined(Point2 endpoint)
{
  Anchor a;
  a.endpoint = endpoint;
  a.provenance = AnchorProvenance::kPredefined;
  return a;
}

Anchor Anchor::evolved(Trajectory trajectory, int from_layer)
{
  Anchor a;
  a.endpoint = trajectory.points.back();
  a.full_trajectory = std::move(trajectory);
  a.provenance = AnchorProvenance::kEvolved;
  a.evolved_from_layer = from_layer;
  return a;
}

std::optional<std::string> validate(const Trajectory & trajectory)
{
  if (trajectory.points.empty()) {
    return "trajectory horizon must be >= 1";
  }
  if (!(trajectory.dt > 0.0) || !std::isfinite(trajectory.dt)) {
    return "non-finite or non-positive dt";
  }
  for (int t = 0; t < trajectory.horizon(); ++t) {
    const auto & p = trajectory.points[t];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      return at_step("non-finite coordinate", t);
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate(
  const GaussianTrajectory & component, const GaussLimits & limits)
{
  if (component.steps.empty()) {
    return "component horizon must be >= 1";
  }
  for (int t = 0; t < component.horizon(); ++t) {
    const auto & s = component.steps[t];
    if (!std::isfinite(s.mu_x) || !std::isfinite(s.mu_y) ||
        !std::isfinite(s.log_sigma_x) || !std::isfinite(s.log_sigma_y) ||
        !std::isfinite(s.rho_raw)) {
      return at_step("non-finite Gaussian parameter", t);
    }
    if (s.log_sigma_x < limits.log_sigma_min || s.log_sigma_x > limits.log_sigma_max ||
        s.log_sigma_y < limits.log_sigma_min || s.log_sigma_y > limits.log_sigma_max) {
      return at_step("log_sigma outside configured range", t);
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate(const MixtureOutput & output, const GaussLimits & limits)
{
  if (output.num_components() < 2) {
    return "mixture needs at least 2 components";
  }
  if (static_cast<int>(output.score_logits.size()) != output.num_components()) {
    return "dimension mismatch: score_logits vs components";
  }
  const int horizon = output.components.front().horizon();
  for (int i = 0; i < output.num_components(); ++i) {
    if (output.components[i].horizon() != horizon) {
      return "dimension mismatch: component horizons differ";
    }
    if (auto err = validate(output.components[i], limits)) {
      return "component " + std::to_string(i) + ": " + *err;
    }
    if (!std::isfinite(output.score_logits[i])) {
      return "non-finite score logit " + std::to_string(i);
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate(const Anchor & anchor)
{
  if (!std::isfinite(anchor.endpoint.x) || !std::isfinite(anchor.endpoint.y)) {
    return "non-finite anchor endpoint";
  }
  if (anchor.provenance == AnchorProvenance::kPredefined) {
    if (anchor.full_trajectory.has_value()) {
      return "predefined anchor must not carry a trajectory";
    }
    return std::nullopt;
  }
  if (!anchor.full_trajectory.has_value()) {
    return "evolved anchor missing its trajectory";
  }
  if (auto err = validate(*anchor.full_trajectory)) {
    return *err;
  }
  const Point2 & last = anchor.full_trajectory->endpoint();
  if (last.x != anchor.endpoint.x || last.y != anchor.endpoint.y) {
    return "evolved anchor endpoint differs from its last trajectory point";
  }
  if (anchor.evolved_from_layer < 1) {
    return "evolved anchor needs a source layer >= 1";
  }
  return std::nullopt;
}

std::optional<std::string> validate(const AnchorSet & set, int expected_size)
{
  if (set.size() != expected_size) {
    return "dimension mismatch: anchor set size " + std::to_string(set.size()) +
           " vs expected " + std::to_string(expected_size);
  }
  for (int i = 0; i < set.size(); ++i) {
    if (auto err = validate(set.anchors[i])) {
      return "anchor " + std::to_string(i) + ": " + *err;
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate(const Scene & scene)
{
  for (double v : scene.context) {
    if (!std::isfinite(v)) {
      return "non-finite context value";
    }
  }
  if (auto err = validate(scene.gt_trajectory)) {
    return *err;
  }
  if (scene.latent_mode < 0) {
    return "negative latent mode";
  }
  if (scene.category < 0) {
    return "negative category";
  }
  return std::nullopt;
}

std::optional<std::string> validate(const Dataset & dataset)
{
  if (dataset.horizon < 1 || dataset.context_dim < 1 || dataset.num_modes < 2) {
    return "dataset dims must be positive (and num_modes >= 2)";
  }
  for (int i = 0; i < dataset.size(); ++i) {
    const Scene & scene = dataset.scenes[i];
    if (auto err = validate(scene)) {
      return "scene " + std::to_string(i) + ": " + *err;
    }
    if (static_cast<int>(scene.context.size()) != dataset.context_dim) {
      return "scene " + std::to_string(i) + ": dimension mismatch: context";
    }
    if (scene.gt_trajectory.horizon() != dataset.horizon) {
      return "scene " + std::to_string(i) + ": dimension mismatch: horizon";
    }
    if (scene.gt_trajectory.dt != dataset.dt) {
      return "scene " + std::to_string(i) + ": dt differs from dataset dt";
    }
    if (scene.latent_mode >= dataset.num_modes) {
      return "scene " + std::to_string(i) + ": latent mode out of range";
    }
  }
  return std::nullopt;
}

std::optional<std::string> validate(const MatchResult & match)
{
  const int n = static_cast<int>(match.distinct_mask.size());
  if (static_cast<int>(match.distances.size()) != n) {
    return "dimension mismatch: distances vs distinct_mask";
  }
  if (match.positive_index < 0 || match.positive_index >= n) {
    return "positive index out of range";
  }
  if (!match.distinct_mask[match.positive_index]) {
    return "distinct_mask[positive_index] is false";
  }
  const double positive_distance = match.distances[match.positive_index];
  for (int i = 0; i < n; ++i) {
    const double d = match.distances[i];
    if (!match.distinct_mask[i]) {
      if (d != std::numeric_limits<double>::infinity()) {
        return "masked-out distance must be +inf";
      }
      continue;
    }
    if (std::isnan(d) || d < 0.0) {
      return "invalid distance for distinct entry " + std::to_string(i);
    }
    if (d < positive_distance) {
      return "positive_index does not minimize distance";
    }
    if (i < match.positive_index && d == positive_distance) {
      return "tie must resolve to the lower index";
    }
  }
  return std::nullopt;
}

}  // namespace eda
