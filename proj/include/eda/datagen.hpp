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

#ifndef EDA__DATAGEN_HPP_
#define EDA__DATAGEN_HPP_

#include <cstdint>
#include <vector>

#include "eda/rng.hpp"
#include "eda/types.hpp"

namespace eda
{

/// Synthetic multimodal driving scenes: every scene draws a maneuver
/// from a context-dependent prior and rolls out a constant-turn-rate
/// trajectory for it. The default six maneuvers are hard-left,
/// soft-left, straight-slow, straight-fast, soft-right, hard-right.
struct GenConfig
{
  int num_scenes = 8000;
  int num_modes = 6;
  double mode_prior_sharpness = 2.5;
  double noise_sigma = 0.2;
  int horizon = 16;
  double dt = 0.25;
  std::uint64_t seed = 1;
  double speed_min = 5.0;
  double speed_max = 15.0;
  std::vector<double> turn_rates;     // rad/s per mode; empty = defaults
  std::vector<double> speed_factors;  // speed multiplier per mode; empty = defaults

  int context_dim() const { return num_modes + 1; }
};

/// Fills turn_rates / speed_factors when unset and checks invariants.
GenConfig resolve_maneuvers(GenConfig config);

/// Per-scene RNG, derived from the dataset seed and the scene index so
/// scenes are independent and generation can run in any order.
Rng scene_rng(std::uint64_t dataset_seed, int scene_index);

/// Sharpened random convex combination over modes: iid exponentials
/// raised to mode_prior_sharpness, normalized.
std::vector<double> sample_mode_prior(Rng & rng, int num_modes, double sharpness);

/// Context layout: the mode prior followed by speed / 10.
std::vector<double> make_context(const std::vector<double> & prior, double speed);

/// Constant-turn-rate rollout of one maneuver (exact arc integration),
/// starting at the origin heading +x; waypoints at t = dt .. horizon*dt.
Trajectory rollout_maneuver(const GenConfig & config, int mode, double speed);

/// Deterministic dataset generation per the config seed. The latent
/// mode is sampled after the context is fixed, so the context is a
/// function of (prior, speed) alone.
Dataset generate_dataset(const GenConfig & config);

}  // namespace eda

#endif  // EDA__DATAGEN_HPP_
