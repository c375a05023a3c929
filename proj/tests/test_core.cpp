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
#include <limits>

#include "eda/types.hpp"
#include "oracles.hpp"

using namespace eda;

TEST_CASE("trajectory validation flags non-finite coordinates")
{
  Trajectory t;
  t.dt = 0.5;
  t.points = {{0.0, 1.0}, {std::nan(""), 2.0}};
  auto err = validate(t);
  REQUIRE(err.has_value());
  CHECK(err->find("non-finite") != std::string::npos);

  t.points[1].x = 3.0;
  CHECK_FALSE(validate(t).has_value());

  t.points.clear();
  CHECK(validate(t).has_value());
}

TEST_CASE("gaussian trajectory log_sigma range is enforced")
{
  GaussianTrajectory g;
  g.steps.resize(2);
  CHECK_FALSE(validate(g).has_value());

  g.steps[1].log_sigma_y = 7.0;
  auto err = validate(g);
  REQUIRE(err.has_value());
  CHECK(err->find("log_sigma") != std::string::npos);

  GaussLimits wide;
  wide.log_sigma_max = 10.0;
  CHECK_FALSE(validate(g, wide).has_value());
}

TEST_CASE("mixture output needs at least two aligned components")
{
  Rng rng(7);
  MixtureOutput out = oracles::random_output(rng, 4, 8);
  CHECK_FALSE(validate(out).has_value());

  out.score_logits.pop_back();
  CHECK(validate(out).has_value());
  out.score_logits.push_back(0.0);

  out.components.resize(1);
  out.score_logits.resize(1);
  CHECK(validate(out).has_value());
}

TEST_CASE("anchor provenance invariants")
{
  Anchor predefined = Anchor::predefined({1.0, 2.0});
  CHECK_FALSE(validate(predefined).has_value());

  predefined.full_trajectory = Trajectory{{{0.0, 0.0}}, 0.5};
  CHECK(validate(predefined).has_value());

  Trajectory t;
  t.dt = 0.5;
  t.points = {{0.0, 0.0}, {3.0, 4.0}};
  Anchor evolved = Anchor::evolved(t, 2);
  CHECK_FALSE(validate(evolved).has_value());
  CHECK(evolved.endpoint.x == 3.0);
  CHECK(evolved.endpoint.y == 4.0);

  evolved.endpoint.x = 2.5;
  auto err = validate(evolved);
  REQUIRE(err.has_value());
  CHECK(err->find("endpoint") != std::string::npos);
}

TEST_CASE("well-formed scene passes validation")
{
  Scene scene;
  scene.context = {0.25, 0.25, 0.5, 1.1};
  scene.gt_trajectory = Trajectory{{{1.0, 0.0}, {2.0, 0.0}}, 0.5};
  scene.latent_mode = 2;
  CHECK_FALSE(validate(scene).has_value());

  scene.context[1] = std::numeric_limits<double>::infinity();
  CHECK(validate(scene).has_value());
}

TEST_CASE("match result consistency")
{
  MatchResult match;
  match.positive_index = 1;
  match.distinct_mask = {true, true, false};
  match.distances = {2.0, 1.0, std::numeric_limits<double>::infinity()};
  CHECK_FALSE(validate(match).has_value());

  SUBCASE("mask[positive] must hold")
  {
    match.distinct_mask[1] = false;
    match.distances[1] = std::numeric_limits<double>::infinity();
    auto err = validate(match);
    REQUIRE(err.has_value());
    CHECK(err->find("distinct_mask[positive_index]") != std::string::npos);
  }
  SUBCASE("positive must minimize over the distinct set")
  {
    match.distances[0] = 0.5;
    CHECK(validate(match).has_value());
  }
  SUBCASE("masked-out entries carry +inf")
  {
    match.distances[2] = 9.0;
    CHECK(validate(match).has_value());
  }
  SUBCASE("distance ties resolve to the lower index")
  {
    match.distances[0] = 1.0;  // equal to the positive's distance at index 1
    CHECK(validate(match).has_value());
  }
}

TEST_CASE("evolved anchors always end at their trajectory's last point")
{
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory t = oracles::random_trajectory(rng, 1 + rng.below(12));
    Anchor anchor = Anchor::evolved(t, 1 + rng.below(5));
    CHECK(anchor.endpoint.x == anchor.full_trajectory->points.back().x);
    CHECK(anchor.endpoint.y == anchor.full_trajectory->points.back().y);
    CHECK_FALSE(validate(anchor).has_value());
  }
}
