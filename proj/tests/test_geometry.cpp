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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eda/geometry.hpp"
#include "oracles.hpp"

using namespace eda;

TEST_CASE("endpoint distance")
{
  CHECK(endpoint_distance(Point2{0.0, 0.0}, Point2{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(endpoint_distance(Point2{2.0, -1.0}, Point2{2.0, -1.0}) == 0.0);
  CHECK(endpoint_distance(Point2{1.0, 1.0}, Point2{4.0, 5.0}) == doctest::Approx(5.0));

  Trajectory a{{{0.0, 0.0}, {1.0, 1.0}}, 0.5};
  Trajectory b{{{5.0, 5.0}, {4.0, 5.0}}, 0.5};
  CHECK(endpoint_distance(a, b) == doctest::Approx(5.0));
}

TEST_CASE("mean pointwise distance")
{
  Rng rng(3);
  Trajectory a = oracles::random_trajectory(rng, 6);
  CHECK(mean_pointwise_distance(a, a) == 0.0);

  Trajectory shifted = a;
  for (auto & p : shifted.points) {
    p.x += 3.0;
    p.y += 4.0;
  }
  CHECK(mean_pointwise_distance(a, shifted) == doctest::Approx(5.0));

  SUBCASE("matches an independent per-step sum")
  {
    for (int trial = 0; trial < 25; ++trial) {
      Trajectory u = oracles::random_trajectory(rng, 4);
      Trajectory v = oracles::random_trajectory(rng, 4);
      double expected = 0.0;
      for (int t = 0; t < 4; ++t) {
        expected += oracles::dist(u.points[t], v.points[t]);
      }
      expected /= 4.0;
      CHECK(mean_pointwise_distance(u, v) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  SUBCASE("length mismatch throws")
  {
    Trajectory shorter = a;
    shorter.points.pop_back();
    CHECK_THROWS_AS(mean_pointwise_distance(a, shorter), std::invalid_argument);
  }

  SUBCASE("symmetry")
  {
    Trajectory u = oracles::random_trajectory(rng, 5);
    Trajectory v = oracles::random_trajectory(rng, 5);
    CHECK(mean_pointwise_distance(u, v) == mean_pointwise_distance(v, u));
  }
}

TEST_CASE("nms threshold formula")
{
  CHECK(nms_threshold(10.0) == 2.5);
  CHECK(nms_threshold(30.0) == 3.25);
  CHECK(nms_threshold(1000.0) == 3.5);
  CHECK(nms_threshold(0.0) == 2.5);

  SUBCASE("monotone non-decreasing and clamped")
  {
    double previous = 0.0;
    for (double length = 0.0; length <= 120.0; length += 0.7) {
      const double sigma = nms_threshold(length);
      CHECK(sigma >= 2.5);
      CHECK(sigma <= 3.5);
      CHECK(sigma >= previous);
      previous = sigma;
    }
  }
}

TEST_CASE("trajectory length modes")
{
  Trajectory t{{{3.0, 0.0}, {3.0, 4.0}, {0.0, 0.0}}, 0.5};
  CHECK(trajectory_length(t) == doctest::Approx(4.0 + 5.0));
  CHECK(trajectory_length(t, LengthMode::kDisplacement) == doctest::Approx(3.0));
}

TEST_CASE("greedy nms basics")
{
  const std::vector<Point2> endpoints = {{0.0, 0.0}, {0.1, 0.0}, {10.0, 0.0}};
  const std::vector<double> scores = {0.9, 0.8, 0.5};
  const NmsKeepList keep = greedy_nms(endpoints, scores, 2.5);
  CHECK(keep.kept == std::vector<int>{0, 2});
  REQUIRE(keep.suppressed_by.size() == 1);
  CHECK(keep.suppressed_by.at(1) == 0);

  CHECK(greedy_nms({{1.0, 1.0}}, {0.3}, 1.0).kept == std::vector<int>{0});

  CHECK_THROWS_AS(greedy_nms({}, {}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(greedy_nms(endpoints, scores, 0.0), std::invalid_argument);
}

TEST_CASE("greedy nms equals the definitional reference")
{
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 20;
    std::vector<Point2> endpoints(n);
    std::vector<double> scores(n);
    for (int i = 0; i < n; ++i) {
      endpoints[i] = {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
      scores[i] = rng.uniform(0.0, 1.0);
    }
    const double sigma = 1.0;
    const NmsKeepList keep = greedy_nms(endpoints, scores, sigma);
    const std::vector<bool> reference = oracles::reference_nms_kept(endpoints, scores, sigma);

    std::vector<bool> mask(n, false);
    for (int idx : keep.kept) {
      mask[idx] = true;
    }
    CHECK(mask == reference);

    // Suppressor properties: within sigma, kept, and at least as high a score.
    for (const auto & [suppressed, suppressor] : keep.suppressed_by) {
      CHECK(mask[suppressor]);
      CHECK(oracles::dist(endpoints[suppressed], endpoints[suppressor]) <= sigma);
      const bool priority = scores[suppressor] > scores[suppressed] ||
                            (scores[suppressor] == scores[suppressed] && suppressor < suppressed);
      CHECK(priority);
    }
  }
}

TEST_CASE("greedy nms properties: argmax kept, pairwise separation, idempotence")
{
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + rng.below(18);
    std::vector<Point2> endpoints(n);
    std::vector<double> scores(n);
    for (int i = 0; i < n; ++i) {
      endpoints[i] = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
      scores[i] = rng.uniform(-2.0, 2.0);
    }
    const double sigma = rng.uniform(0.5, 3.0);
    const NmsKeepList keep = greedy_nms(endpoints, scores, sigma);

    CHECK(keep.kept.front() == score_order(scores).front());
    for (std::size_t a = 0; a < keep.kept.size(); ++a) {
      for (std::size_t b = a + 1; b < keep.kept.size(); ++b) {
        CHECK(oracles::dist(endpoints[keep.kept[a]], endpoints[keep.kept[b]]) > sigma);
      }
    }

    std::vector<Point2> kept_endpoints;
    std::vector<double> kept_scores;
    for (int idx : keep.kept) {
      kept_endpoints.push_back(endpoints[idx]);
      kept_scores.push_back(scores[idx]);
    }
    const NmsKeepList again = greedy_nms(kept_endpoints, kept_scores, sigma);
    CHECK(static_cast<int>(again.kept.size()) == static_cast<int>(keep.kept.size()));
    CHECK(again.suppressed_by.empty());
  }
}
