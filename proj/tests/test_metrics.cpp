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

#include <algorithm>
#include <cmath>

#include "eda/metrics.hpp"
#include "oracles.hpp"

using namespace eda;

namespace
{

// One-step trajectory whose endpoint sits at the given offset from gt.
Trajectory offset_trajectory(const Trajectory & gt, double dx, double dy)
{
  Trajectory t = gt;
  for (auto & p : t.points) {
    p.x += dx;
    p.y += dy;
  }
  return t;
}

SelectedPredictions make_selected(
  const Trajectory & gt, const std::vector<double> & scores,
  const std::vector<double> & endpoint_errors)
{
  SelectedPredictions s;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    s.trajectories.push_back(offset_trajectory(gt, endpoint_errors[i], 0.0));
    s.scores.push_back(scores[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("select_top_k")
{
  Rng rng(41);

  SUBCASE("k = 1 returns the argmax-score component")
  {
    MixtureOutput out = oracles::random_output(rng, 8, 5);
    const int top = score_order(out.score_logits).front();
    const SelectedPredictions selected = select_top_k(out, 1);
    REQUIRE(selected.size() == 1);
    CHECK(selected.trajectories[0].points.back().x ==
          out.components[top].steps.back().mu_x);
  }

  SUBCASE("coincident components back-fill by score")
  {
    MixtureOutput out = oracles::random_output(rng, 5, 3);
    for (auto & component : out.components) {
      component.steps = out.components[0].steps;  // all identical
    }
    out.score_logits = {0.3, 1.4, -0.2, 0.8, 0.1};
    const SelectedPredictions selected = select_top_k(out, 3);
    REQUIRE(selected.size() == 3);
    // NMS keeps only the argmax; the rest are the best-scored suppressed.
    CHECK(selected.scores[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.4))));
    CHECK(selected.scores[1] == doctest::Approx(1.0 / (1.0 + std::exp(-0.8))));
    CHECK(selected.scores[2] == doctest::Approx(1.0 / (1.0 + std::exp(-0.3))));
  }

  SUBCASE("scores always descend and k components always return")
  {
    for (int trial = 0; trial < 200; ++trial) {
      MixtureOutput out = oracles::random_output(rng, 16, 4);
      const SelectedPredictions selected = select_top_k(out, 6);
      REQUIRE(selected.size() == 6);
      for (int i = 1; i < 6; ++i) {
        CHECK(selected.scores[i] <= selected.scores[i - 1]);
      }
    }
  }

  SUBCASE("matches the reference NMS + back-fill construction")
  {
    for (int trial = 0; trial < 200; ++trial) {
      MixtureOutput out = oracles::random_output(rng, 16, 4);
      // Shrink the spread so suppression actually happens.
      for (auto & component : out.components) {
        for (auto & s : component.steps) {
          s.mu_x *= 0.2;
          s.mu_y *= 0.2;
        }
      }
      const int k = 6;
      const SelectedPredictions selected = select_top_k(out, k);

      std::vector<Point2> endpoints(16);
      for (int i = 0; i < 16; ++i) {
        endpoints[i] = {out.components[i].steps.back().mu_x,
                        out.components[i].steps.back().mu_y};
      }
      const int top = score_order(out.score_logits).front();
      const double sigma =
        nms_threshold(trajectory_length(mean_trajectory(out.components[top], out.dt)));
      const std::vector<bool> kept =
        oracles::reference_nms_kept(endpoints, out.score_logits, sigma);

      std::vector<int> expected;
      for (int idx : score_order(out.score_logits)) {
        if (kept[idx] && static_cast<int>(expected.size()) < k) {
          expected.push_back(idx);
        }
      }
      for (int idx : score_order(out.score_logits)) {
        if (static_cast<int>(expected.size()) == k) {
          break;
        }
        if (!kept[idx]) {
          expected.push_back(idx);
        }
      }
      std::sort(expected.begin(), expected.end(), [&](int a, int b) {
        if (out.score_logits[a] != out.score_logits[b]) {
          return out.score_logits[a] > out.score_logits[b];
        }
        return a < b;
      });
      REQUIRE(static_cast<int>(expected.size()) == k);
      for (int i = 0; i < k; ++i) {
        CHECK(selected.trajectories[i].points.back().x ==
              out.components[expected[i]].steps.back().mu_x);
      }
    }
  }

  SUBCASE("k out of range throws")
  {
    MixtureOutput out = oracles::random_output(rng, 4, 3);
    CHECK_THROWS_AS(select_top_k(out, 0), std::invalid_argument);
    CHECK_THROWS_AS(select_top_k(out, 5), std::invalid_argument);
  }
}

TEST_CASE("score transforms")
{
  SUBCASE("scaled divides by the sum")
  {
    const auto out = score_transform({0.2, 0.2}, ScoreMode::kScaled);
    CHECK(out[0] == doctest::Approx(0.5));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(score_transform({0.0, 0.0}, ScoreMode::kScaled), std::invalid_argument);
  }

  SUBCASE("rank adds K - rank")
  {
    const auto out = score_transform({0.5, 0.3, 0.2}, ScoreMode::kRank);
    CHECK(out[0] == doctest::Approx(2.5));
    CHECK(out[1] == doctest::Approx(1.3));
    CHECK(out[2] == doctest::Approx(0.2));

    std::vector<double> six = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
    const auto ranked = score_transform(six, ScoreMode::kRank);
    CHECK(ranked[0] == doctest::Approx(0.9 + 5.0));  // top-ranked gets +5
    CHECK(ranked[5] == doctest::Approx(0.4));
  }

  SUBCASE("original is the identity")
  {
    const std::vector<double> scores = {0.6, 0.2, 0.1};
    CHECK(score_transform(scores, ScoreMode::kOriginal) == scores);
  }

  SUBCASE("scaled scores sum to one")
  {
    Rng rng(43);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = 1 + rng.below(8);
      std::vector<double> scores(k);
      for (double & s : scores) {
        s = rng.uniform(1e-4, 1.0);
      }
      std::sort(scores.rbegin(), scores.rend());
      const auto scaled = score_transform(scores, ScoreMode::kScaled);
      double sum = 0.0;
      for (double s : scaled) {
        sum += s;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("min metrics and miss classification")
{
  Rng rng(47);
  Trajectory gt = oracles::random_trajectory(rng, 6);

  SUBCASE("exact prediction")
  {
    SelectedPredictions s = make_selected(gt, {0.9, 0.5}, {0.0, 7.0});
    CHECK(min_ade(s, gt) == 0.0);
    CHECK(min_fde(s, gt) == 0.0);
    CHECK_FALSE(is_miss(s, gt, 2.0));
  }

  SUBCASE("uniform offset")
  {
    SelectedPredictions s;
    s.trajectories = {offset_trajectory(gt, 3.0, 4.0), offset_trajectory(gt, 3.0, 4.0)};
    s.scores = {0.9, 0.5};
    CHECK(min_ade(s, gt) == doctest::Approx(5.0));
    CHECK(min_fde(s, gt) == doctest::Approx(5.0));
    CHECK(is_miss(s, gt, 2.0));
  }

  SUBCASE("random set equals exhaustive per-candidate computation")
  {
    for (int trial = 0; trial < 100; ++trial) {
      SelectedPredictions s;
      const int k = 1 + rng.below(6);
      for (int i = 0; i < k; ++i) {
        s.trajectories.push_back(oracles::random_trajectory(rng, 6));
        s.scores.push_back(rng.uniform(0.0, 1.0));
      }
      double best_ade = 1e300, best_fde = 1e300;
      for (const Trajectory & t : s.trajectories) {
        double ade = 0.0;
        for (int step = 0; step < 6; ++step) {
          ade += oracles::dist(t.points[step], gt.points[step]);
        }
        best_ade = std::min(best_ade, ade / 6.0);
        best_fde = std::min(best_fde, oracles::dist(t.points.back(), gt.points.back()));
      }
      CHECK(min_ade(s, gt) == doctest::Approx(best_ade).epsilon(1e-12));
      CHECK(min_fde(s, gt) == doctest::Approx(best_fde).epsilon(1e-12));
    }
  }
}

TEST_CASE("average precision fixtures")
{
  Trajectory gt{{{0.0, 0.0}}, 0.5};

  SUBCASE("frozen 4-scene x 2-prediction case")
  {
    // Hit pattern and scores chosen before the build; the brute-force
    // PR enumeration gives exactly 0.65.
    std::vector<SelectedPredictions> selections = {
      make_selected(gt, {0.90, 0.80}, {0.0, 9.0}),
      make_selected(gt, {0.85, 0.70}, {9.0, 0.0}),
      make_selected(gt, {0.60, 0.50}, {9.0, 9.0}),
      make_selected(gt, {0.95, 0.40}, {0.0, 0.0}),
    };
    std::vector<Trajectory> gts(4, gt);
    const double ap = average_precision(selections, gts, ScoreMode::kOriginal, 2.0);
    CHECK(ap == doctest::Approx(0.65).epsilon(1e-12));

    std::vector<oracles::PooledCase> pool = {
      {0.90, 0, 0, true},  {0.80, 0, 1, false}, {0.85, 1, 0, false}, {0.70, 1, 1, true},
      {0.60, 2, 0, false}, {0.50, 2, 1, false}, {0.95, 3, 0, true},  {0.40, 3, 1, true},
    };
    CHECK(oracles::reference_average_precision(pool, 4) == doctest::Approx(0.65).epsilon(1e-12));
  }

  SUBCASE("k = 1 with every scene hit gives 1.0")
  {
    std::vector<SelectedPredictions> selections = {
      make_selected(gt, {0.9}, {0.0}),
      make_selected(gt, {0.2}, {1.0}),
      make_selected(gt, {0.6}, {0.5}),
    };
    std::vector<Trajectory> gts(3, gt);
    CHECK(average_precision(selections, gts, ScoreMode::kOriginal, 2.0) == doctest::Approx(1.0));
  }

  SUBCASE("no hits anywhere gives 0.0")
  {
    std::vector<SelectedPredictions> selections = {
      make_selected(gt, {0.9, 0.8}, {9.0, 8.0}),
      make_selected(gt, {0.7, 0.6}, {7.0, 6.0}),
    };
    std::vector<Trajectory> gts(2, gt);
    CHECK(average_precision(selections, gts, ScoreMode::kOriginal, 2.0) == 0.0);
  }
}

TEST_CASE("average precision equals the brute-force enumeration on a seeded grid")
{
  Rng rng(53);
  Trajectory gt{{{0.0, 0.0}}, 0.5};
  for (int grid_case = 0; grid_case < 200; ++grid_case) {
    const int scenes = 3, k = 2;
    std::vector<SelectedPredictions> selections;
    std::vector<oracles::PooledCase> pool;
    std::vector<Trajectory> gts(scenes, gt);
    for (int s = 0; s < scenes; ++s) {
      std::vector<double> scores = {rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)};
      std::sort(scores.rbegin(), scores.rend());
      std::vector<double> errors(k);
      for (int r = 0; r < k; ++r) {
        errors[r] = rng.uniform01() < 0.5 ? rng.uniform(0.0, 1.5) : rng.uniform(3.0, 9.0);
        pool.push_back({scores[r], s, r, errors[r] <= 2.0});
      }
      selections.push_back(make_selected(gt, scores, errors));
    }
    const double ours = average_precision(selections, gts, ScoreMode::kOriginal, 2.0);
    const double reference = oracles::reference_average_precision(pool, scenes);
    CHECK(std::abs(ours - reference) <= 1e-9);
  }
}

TEST_CASE("rank transform stratifies the pooled ordering")
{
  Rng rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    const int scenes = 2 + rng.below(5);
    const int k = 2 + rng.below(5);
    struct Entry
    {
      double score;
      int rank;
    };
    std::vector<Entry> pooled;
    for (int s = 0; s < scenes; ++s) {
      std::vector<double> scores(k);
      for (double & v : scores) {
        v = rng.uniform(0.0, 1.0);
      }
      std::sort(scores.rbegin(), scores.rend());
      const auto transformed = score_transform(scores, ScoreMode::kRank);
      for (int r = 0; r < k; ++r) {
        pooled.push_back({transformed[r], r});
      }
    }
    std::sort(pooled.begin(), pooled.end(),
              [](const Entry & a, const Entry & b) { return a.score > b.score; });
    // Every scene's rank-r prediction sorts before any scene's rank-(r+1).
    for (std::size_t i = 1; i < pooled.size(); ++i) {
      CHECK(pooled[i].rank >= pooled[i - 1].rank);
    }
  }
}

TEST_CASE("rank-mode mAP ignores order-preserving rescaling of the original scores")
{
  // A shared monotone recalibration of the scores keeps both the rank
  // bands and the within-band cross-scene order, so the pooled sweep is
  // identical. (Per-scene factors can legally reorder entries inside a
  // band and change AP, so the invariance is about shared rescalings.)
  Rng rng(61);
  Trajectory gt{{{0.0, 0.0}}, 0.5};
  for (int trial = 0; trial < 50; ++trial) {
    const int scenes = 4, k = 3;
    const double factor = rng.uniform(0.05, 0.95);
    const double gamma = rng.uniform(0.5, 2.0);
    std::vector<SelectedPredictions> original, rescaled;
    std::vector<Trajectory> gts(scenes, gt);
    for (int s = 0; s < scenes; ++s) {
      std::vector<double> scores(k), errors(k);
      for (int r = 0; r < k; ++r) {
        scores[r] = rng.uniform(0.05, 0.95);
        errors[r] = rng.uniform01() < 0.5 ? 0.0 : 9.0;
      }
      std::sort(scores.rbegin(), scores.rend());
      original.push_back(make_selected(gt, scores, errors));
      std::vector<double> recalibrated(k);
      for (int r = 0; r < k; ++r) {
        recalibrated[r] = factor * std::pow(scores[r], gamma);
      }
      rescaled.push_back(make_selected(gt, recalibrated, errors));
    }
    const double a = average_precision(original, gts, ScoreMode::kRank, 2.0);
    const double b = average_precision(rescaled, gts, ScoreMode::kRank, 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("bundle metrics are mutually consistent")
{
  Rng rng(67);
  Trajectory gt = oracles::random_trajectory(rng, 5);
  std::vector<SelectedPredictions> selections;
  std::vector<Trajectory> gts;
  const int scenes = 40;
  for (int s = 0; s < scenes; ++s) {
    Trajectory scene_gt = oracles::random_trajectory(rng, 5);
    SelectedPredictions sel;
    for (int r = 0; r < 4; ++r) {
      sel.trajectories.push_back(
        offset_trajectory(scene_gt, rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0)));
      sel.scores.push_back(1.0 / (1.0 + std::exp(-rng.uniform(-2.0, 2.0))));
    }
    std::sort(sel.scores.rbegin(), sel.scores.rend());
    selections.push_back(std::move(sel));
    gts.push_back(std::move(scene_gt));
  }
  const MetricsBundle bundle = compute_metrics(selections, gts, 2.0);

  double sum_ade = 0.0, sum_fde = 0.0, misses = 0.0;
  for (int s = 0; s < scenes; ++s) {
    sum_ade += min_ade(selections[s], gts[s]);
    sum_fde += min_fde(selections[s], gts[s]);
    misses += is_miss(selections[s], gts[s], 2.0) ? 1.0 : 0.0;
  }
  CHECK(bundle.min_ade == doctest::Approx(sum_ade / scenes).epsilon(1e-12));
  CHECK(bundle.min_fde == doctest::Approx(sum_fde / scenes).epsilon(1e-12));
  CHECK(bundle.miss_rate == doctest::Approx(misses / scenes).epsilon(1e-12));
  CHECK(bundle.miss_rate >= 0.0);
  CHECK(bundle.miss_rate <= 1.0);
  CHECK(bundle.map_original >= 0.0);
  CHECK(bundle.map_original <= 1.0);
  REQUIRE(static_cast<int>(bundle.details.size()) == scenes);
  for (int s = 0; s < scenes; ++s) {
    CHECK(bundle.details[s].miss == (bundle.details[s].min_fde > 2.0));
  }
}
