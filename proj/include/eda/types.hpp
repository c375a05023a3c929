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

#ifndef EDA__TYPES_HPP_
#define EDA__TYPES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eda
{

/// 2D point in length units.
struct Point2
{
  double x = 0.0;
  double y = 0.0;
};

/// Fixed-horizon sequence of 2D waypoints with a uniform timestep.
/// The common currency of predictions, anchors and ground truth.
struct Trajectory
{
  std::vector<Point2> points;
  double dt = 0.1;  // seconds per step

  int horizon() const { return static_cast<int>(points.size()); }
  const Point2 & endpoint() const { return points.back(); }
};

/// Per-step parameters of a bivariate Gaussian over (x, y).
/// log_sigma values are stored already clamped to the configured range;
/// rho_raw is unbounded and mapped to a correlation via
/// rho = rho_bound * tanh(rho_raw) wherever a correlation is needed.
struct GaussStep
{
  double mu_x = 0.0;
  double mu_y = 0.0;
  double log_sigma_x = 0.0;
  double log_sigma_y = 0.0;
  double rho_raw = 0.0;
};

struct GaussianTrajectory
{
  std::vector<GaussStep> steps;

  int horizon() const { return static_cast<int>(steps.size()); }
};

/// Bounds shared by every GaussianTrajectory of a model.
struct GaussLimits
{
  double log_sigma_min = -5.0;
  double log_sigma_max = 5.0;
  double rho_bound = 0.5;  // < 1 so |rho| < 1 always
};

/// One decoder layer's mixture: N_C scored Gaussian trajectory components.
struct MixtureOutput
{
  std::vector<GaussianTrajectory> components;
  std::vector<double> score_logits;
  int layer_index = 0;  // 1-based
  double dt = 0.1;

  int num_components() const { return static_cast<int>(components.size()); }
};

/// Mean trajectory (mu fields) of one component.
Trajectory mean_trajectory(const GaussianTrajectory & component, double dt);

enum class AnchorProvenance { kPredefined, kEvolved };

/// Spatial prior tied to one mixture component. Predefined anchors are
/// bare intention endpoints; evolved anchors carry the full trajectory
/// of the decoder layer they were taken from.
struct Anchor
{
  Point2 endpoint;
  std::optional<Trajectory> full_trajectory;
  AnchorProvenance provenance = AnchorProvenance::kPredefined;
  int evolved_from_layer = 0;  // 1-based, meaningful only when evolved

  static Anchor predefined(Point2 endpoint);
  static Anchor evolved(Trajectory trajectory, int from_layer);
};

/// The per-layer anchors, index-aligned with MixtureOutput components.
struct AnchorSet
{
  std::vector<Anchor> anchors;

  int size() const { return static_cast<int>(anchors.size()); }
};

/// One synthetic prediction case. latent_mode is the generator's oracle
/// label; it is stored for diagnostics only and never enters the context
/// the model sees.
struct Scene
{
  std::vector<double> context;
  Trajectory gt_trajectory;
  int latent_mode = 0;
  int category = 0;
};

/// A homogeneous collection of scenes plus the dims they share.
struct Dataset
{
  int horizon = 0;
  double dt = 0.0;
  int context_dim = 0;
  int num_modes = 0;
  std::vector<Scene> scenes;

  int size() const { return static_cast<int>(scenes.size()); }
};

/// Outcome of positive-component selection for one scene and layer.
/// distances[i] is the anchor-to-GT distance, +inf for non-distinct
/// entries; positive_index minimizes distance over the distinct set.
struct MatchResult
{
  int positive_index = 0;
  std::vector<bool> distinct_mask;
  std::vector<double> distances;
};

/// Validation: nullopt means the value satisfies its invariants, else a
/// message naming the violated invariant.
std::optional<std::string> validate(const Trajectory & trajectory);
std::optional<std::string> validate(
  const GaussianTrajectory & component, const GaussLimits & limits = {});
std::optional<std::string> validate(
  const MixtureOutput & output, const GaussLimits & limits = {});
std::optional<std::string> validate(const Anchor & anchor);
std::optional<std::string> validate(const AnchorSet & set, int expected_size);
std::optional<std::string> validate(const Scene & scene);
std::optional<std::string> validate(const Dataset & dataset);
std::optional<std::string> validate(const MatchResult & match);

}  // namespace eda

#endif  // EDA__TYPES_HPP_
