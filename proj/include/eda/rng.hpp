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

#ifndef EDA__RNG_HPP_
#define EDA__RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace eda
{

// Samplers are built directly on mt19937_64 bits. The engine is
// bit-specified by the standard; std::*_distribution is not, and stream
// files and training traces have to replay identically everywhere.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; one value per call.
  double normal()
  {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) {
      u1 = uniform01();
    }
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Index sampled with probability proportional to weights (CDF scan).
  int categorical(const std::vector<double> & weights)
  {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) {
        throw std::invalid_argument("categorical: negative weight");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("categorical: weights sum to zero");
    }
    const double target = uniform01() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      cumulative += weights[i];
      if (target < cumulative) {
        return static_cast<int>(i);
      }
    }
    return static_cast<int>(weights.size()) - 1;
  }

  /// Integer in [0, n).
  int below(int n)
  {
    return static_cast<int>(uniform01() * static_cast<double>(n)) % n;
  }

  /// Fisher-Yates shuffle of indices 0..n-1.
  std::vector<int> permutation(int n)
  {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) {
      p[i] = i;
    }
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(engine_() % static_cast<std::uint64_t>(i + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// splitmix64 finalizer; used to derive well-mixed per-entity seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for the index-th entity of a seeded stream (scenes, instances).
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index)
{
  return splitmix64(seed ^ splitmix64(index + 1));
}

}  // namespace eda

#endif  // EDA__RNG_HPP_
