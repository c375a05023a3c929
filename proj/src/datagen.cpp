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

#include "eda/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace eda
{
namespace
{

// Defaults for the named six maneuvers: hard-left, soft-left,
// straight-slow, straight-fast, soft-right, hard-right.
const std::vector<double> kDefaultTurnRates = {0.35, 0.15, 0.0, 0.0, -0.15, -0.35};
const std::vector<double> kDefaultSpeedFactors = {0.75, 0.9, 0.55, 1.0, 0.9, 0.75};

}  // namespace

GenConfig resolve_maneuvers(GenConfig config)
{
  if (config.num_modes < 2) {
    throw std::invalid_argument("gen config: num_modes must be >= 2");
  }
  if (config.noise_sigma < 0.0) {
    throw std::invalid_argument("gen config: noise_sigma must be >= 0");
  }
  if (config.horizon < 1 || !(config.dt > 0.0)) {
    throw std::invalid_argument("gen config: horizon and dt must be positive");
  }
  if (!(config.speed_min > 0.0) || config.speed_max < config.speed_min) {
    throw std::invalid_argument("gen config: bad speed range");
  }
  if (config.turn_rates.empty()) {
    if (config.num_modes == 6) {
      config.turn_rates = kDefaultTurnRates;
    } else {
      // Evenly spaced from hard left to hard right.
      config.turn_rates.resize(config.num_modes);
      for (int m = 0; m < config.num_modes; ++m) {
        config.turn_rates[m] =
          0.35 * (1.0 - 2.0 * static_cast<double>(m) / static_cast<double>(config.num_modes - 1));
      }
    }
  }
  if (config.speed_factors.empty()) {
    if (config.num_modes == 6) {
      config.speed_factors = kDefaultSpeedFactors;
    } else {
      config.speed_factors.assign(config.num_modes, 1.0);
    }
  }
  if (static_cast<int>(config.turn_rates.size()) != config.num_modes ||
      static_cast<int>(config.speed_factors.size()) != config.num_modes) {
    throw std::invalid_argument("gen config: maneuver lists must have num_modes entries");
  }
  return config;
}

Rng scene_rng(std::uint64_t dataset_seed, int scene_index)
{
  return Rng(derived_seed(dataset_seed, static_cast<std::uint64_t>(scene_index)));
}

std::vector<double> sample_mode_prior(Rng & rng, int num_modes, double sharpness)
{
  std::vector<double> prior(num_modes);
  double total = 0.0;
  for (int m = 0; m < num_modes; ++m) {
    double u = rng.uniform01();
    while (u <= 0.0) {
      u = rng.uniform01();
    }
    const double exponential = -std::log(u);
    prior[m] = std::pow(exponential, sharpness);
    total += prior[m];
  }
  for (double & p : prior) {
    p /= total;
  }
  return prior;
}

std::vector<double> make_context(const std::vector<double> & prior, double speed)
{
  std::vector<double> context = prior;
  context.push_back(speed / 10.0);
  return context;
}

Trajectory rollout_maneuver(const GenConfig & config, int mode, double speed)
{
  if (mode < 0 || mode >= config.num_modes) {
    throw std::invalid_argument("rollout_maneuver: mode out of range");
  }
  const double omega = config.turn_rates[mode];
  const double v = speed * config.speed_factors[mode];

  Trajectory trajectory;
  trajectory.dt = config.dt;
  trajectory.points.resize(config.horizon);
  for (int k = 1; k <= config.horizon; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    Point2 & p = trajectory.points[k - 1];
    if (omega == 0.0) {
      p = {v * t, 0.0};
    } else {
      p = {v / omega * std::sin(omega * t), v / omega * (1.0 - std::cos(omega * t))};
    }
  }
  return trajectory;
}

Dataset generate_dataset(const GenConfig & raw_config)
{
  const GenConfig config = resolve_maneuvers(raw_config);

  Dataset dataset;
  dataset.horizon = config.horizon;
  dataset.dt = config.dt;
  dataset.context_dim = config.context_dim();
  dataset.num_modes = config.num_modes;
  dataset.scenes.resize(config.num_scenes);

  for (int index = 0; index < config.num_scenes; ++index) {
    Rng rng = scene_rng(config.seed, index);
    const std::vector<double> prior =
      sample_mode_prior(rng, config.num_modes, config.mode_prior_sharpness);
    const double speed = rng.uniform(config.speed_min, config.speed_max);

    Scene & scene = dataset.scenes[index];
    scene.context = make_context(prior, speed);
    scene.latent_mode = rng.categorical(prior);
    scene.category = 0;
    scene.gt_trajectory = rollout_maneuver(config, scene.latent_mode, speed);
    if (config.noise_sigma > 0.0) {
      for (Point2 & p : scene.gt_trajectory.points) {
        p.x += config.noise_sigma * rng.normal();
        p.y += config.noise_sigma * rng.normal();
      }
    }
  }
  return dataset;
}

}  // namespace eda
