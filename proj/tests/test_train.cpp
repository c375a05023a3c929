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
#include <cstring>

#include "eda/assignment.hpp"
#include "eda/datagen.hpp"
#include "eda/train.hpp"
#include "oracles.hpp"

using namespace eda;

namespace
{

Dataset tiny_dataset(int scenes, std::uint64_t seed)
{
  GenConfig config;
  config.num_scenes = scenes;
  config.horizon = 8;
  config.seed = seed;
  return generate_dataset(config);
}

std::vector<Point2> tiny_anchors(const Dataset & data, int k)
{
  std::vector<Point2> endpoints;
  for (const Scene & scene : data.scenes) {
    endpoints.push_back(scene.gt_trajectory.endpoint());
  }
  return kmeans_endpoints(endpoints, k, 3).centroids;
}

ModelConfig tiny_model(const Dataset & data, int components)
{
  ModelConfig config;
  config.context_dim = data.context_dim;
  config.hidden_dim = 16;
  config.num_layers = 3;
  config.num_components = components;
  config.horizon = data.horizon;
  config.seed = 5;
  return config;
}

bool outputs_identical(const std::vector<MixtureOutput> & a, const std::vector<MixtureOutput> & b)
{
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l].score_logits != b[l].score_logits) {
      return false;
    }
    for (std::size_t i = 0; i < a[l].components.size(); ++i) {
      const auto & sa = a[l].components[i].steps;
      const auto & sb = b[l].components[i].steps;
      if (sa.size() != sb.size()) {
        return false;
      }
      if (std::memcmp(sa.data(), sb.data(), sa.size() * sizeof(GaussStep)) != 0) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("assign_layers per paradigm")
{
  Rng rng(71);
  const int layers = 3, n = 8, horizon = 6;
  AnchorSet predefined;
  for (int i = 0; i < n; ++i) {
    predefined.anchors.push_back(
      Anchor::predefined({rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)}));
  }
  std::vector<MixtureOutput> outputs;
  for (int l = 0; l < layers; ++l) {
    MixtureOutput out = oracles::random_output(rng, n, horizon);
    out.layer_index = l + 1;
    outputs.push_back(std::move(out));
  }
  const Trajectory gt = oracles::random_trajectory(rng, horizon);

  SUBCASE("prediction-based matches layer-own predictions")
  {
    AssignmentConfig config;
    config.paradigm = Paradigm::kPrediction;
    const auto matches = assign_layers(outputs, predefined, gt, config);
    REQUIRE(static_cast<int>(matches.size()) == layers);
    for (int l = 0; l < layers; ++l) {
      CHECK(matches[l].positive_index ==
            match_prediction_based(outputs[l], gt).positive_index);
    }
  }

  SUBCASE("prediction-based rejects distinct selection")
  {
    AssignmentConfig config;
    config.paradigm = Paradigm::kPrediction;
    config.distinct = true;
    CHECK_THROWS_AS(assign_layers(outputs, predefined, gt, config), std::invalid_argument);
  }

  SUBCASE("anchor paradigm equals eda with empty schedule")
  {
    AssignmentConfig anchor_config;
    anchor_config.paradigm = Paradigm::kAnchor;
    AssignmentConfig eda_config;
    eda_config.paradigm = Paradigm::kEda;
    eda_config.schedule.num_layers = layers;

    const auto anchor_matches = assign_layers(outputs, predefined, gt, anchor_config);
    const auto eda_matches = assign_layers(outputs, predefined, gt, eda_config);
    for (int l = 0; l < layers; ++l) {
      CHECK(anchor_matches[l].positive_index == eda_matches[l].positive_index);
      CHECK(anchor_matches[l].positive_index ==
            match_anchor_based(predefined, gt).positive_index);
      CHECK(anchor_matches[l].distinct_mask == std::vector<bool>(n, true));
    }
  }

  SUBCASE("eda with evolutions matches against the evolved anchors")
  {
    AssignmentConfig config;
    config.paradigm = Paradigm::kEda;
    config.schedule.num_layers = layers;
    config.schedule.evolve_after_layers = {1};
    const auto matches = assign_layers(outputs, predefined, gt, config);
    // Layers 2..3 match against layer-1 mean trajectories.
    const AnchorSet evolved =
      anchors_for_layer(2, predefined, outputs, config.schedule);
    CHECK(matches[1].positive_index ==
          match_eda(evolved, std::vector<bool>(n, true), gt).positive_index);
  }

  SUBCASE("distinct masks come from score-sorted NMS with the adaptive sigma")
  {
    AssignmentConfig config;
    config.paradigm = Paradigm::kEda;
    config.schedule.num_layers = layers;
    config.distinct = true;
    const auto matches = assign_layers(outputs, predefined, gt, config);
    for (int l = 0; l < layers; ++l) {
      const int top = score_order(outputs[l].score_logits).front();
      const double sigma = nms_threshold(
        trajectory_length(mean_trajectory(outputs[l].components[top], outputs[l].dt)));
      const auto expected =
        select_distinct(predefined, outputs[l].score_logits, sigma);
      CHECK(matches[l].distinct_mask == expected);
      CHECK(matches[l].distinct_mask[matches[l].positive_index]);
    }
  }
}

TEST_CASE("training is deterministic and the anchor/eda reduction is bitwise")
{
  const Dataset data = tiny_dataset(96, 13);
  const std::vector<Point2> anchors = tiny_anchors(data, 6);
  const ModelConfig model_config = tiny_model(data, 6);

  TrainConfig base;
  base.assignment.paradigm = Paradigm::kAnchor;
  base.epochs = 2;
  base.batch_size = 32;
  base.seed = 21;
  base.threads = 2;

  const TrainResult a = train_model(data, anchors, model_config, base);
  const TrainResult b = train_model(data, anchors, model_config, base);
  CHECK(a.params.theta == b.params.theta);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    CHECK(a.log[e].mean_loss.total == b.log[e].mean_loss.total);
  }

  TrainConfig eda_config = base;
  eda_config.assignment.paradigm = Paradigm::kEda;
  eda_config.assignment.schedule.num_layers = model_config.num_layers;
  const TrainResult c = train_model(data, anchors, model_config, eda_config);
  CHECK(a.params.theta == c.params.theta);
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    CHECK(a.log[e].mean_loss.total == c.log[e].mean_loss.total);
  }

  SUBCASE("thread count does not change the result")
  {
    TrainConfig single = base;
    single.threads = 1;
    const TrainResult d = train_model(data, anchors, model_config, single);
    CHECK(a.params.theta == d.params.theta);
  }
}

TEST_CASE("training config validation")
{
  const Dataset data = tiny_dataset(40, 17);
  const std::vector<Point2> anchors = tiny_anchors(data, 4);
  const ModelConfig model_config = tiny_model(data, 4);

  TrainConfig config;
  config.epochs = 1;

  SUBCASE("schedule layer mismatch")
  {
    config.assignment.paradigm = Paradigm::kEda;
    config.assignment.schedule.num_layers = 6;  // model has 3
    config.assignment.schedule.evolve_after_layers = {2, 4};
    CHECK_THROWS_AS(train_model(data, anchors, model_config, config), std::invalid_argument);
  }

  SUBCASE("distinct with prediction matching")
  {
    config.assignment.paradigm = Paradigm::kPrediction;
    config.assignment.distinct = true;
    CHECK_THROWS_AS(train_model(data, anchors, model_config, config), std::invalid_argument);
  }

  SUBCASE("horizon mismatch")
  {
    ModelConfig wrong = model_config;
    wrong.horizon = data.horizon + 1;
    config.assignment.paradigm = Paradigm::kAnchor;
    CHECK_THROWS_AS(train_model(data, anchors, wrong, config), std::invalid_argument);
  }
}

TEST_CASE("forward outputs never depend on the assignment configuration")
{
  const Dataset data = tiny_dataset(24, 19);
  const std::vector<Point2> anchors = tiny_anchors(data, 6);
  const ModelConfig model_config = tiny_model(data, 6);
  const ModelParams params = init_model(model_config, predefined_anchor_set(anchors));

  std::vector<const Scene *> scenes;
  for (const Scene & scene : data.scenes) {
    scenes.push_back(&scene);
  }
  const ForwardPass before = forward_pass(params, scenes);

  std::vector<AssignmentConfig> configs;
  {
    AssignmentConfig c;
    c.paradigm = Paradigm::kPrediction;
    configs.push_back(c);
    c = AssignmentConfig{};
    c.paradigm = Paradigm::kAnchor;
    configs.push_back(c);
    c = AssignmentConfig{};
    c.paradigm = Paradigm::kEda;
    c.schedule.num_layers = model_config.num_layers;
    c.schedule.evolve_after_layers = {1, 2};
    c.distinct = true;
    configs.push_back(c);
  }
  const AnchorSet predefined = predefined_anchor_set(anchors);
  for (const AssignmentConfig & config : configs) {
    const ForwardPass pass = forward_pass(params, scenes);
    for (int s = 0; s < data.size(); ++s) {
      // Assign (and discard) to prove matching cannot perturb outputs.
      const auto matches =
        assign_layers(pass.outputs[s], predefined, data.scenes[s].gt_trajectory, config);
      CHECK(static_cast<int>(matches.size()) == model_config.num_layers);
      CHECK(outputs_identical(before.outputs[s], pass.outputs[s]));
    }
  }
}

TEST_CASE("batched training gradient equals the per-scene composition")
{
  const Dataset data = tiny_dataset(16, 23);
  const std::vector<Point2> anchors = tiny_anchors(data, 4);
  const ModelConfig model_config = tiny_model(data, 4);
  const AnchorSet predefined = predefined_anchor_set(anchors);
  const ModelParams params = init_model(model_config, predefined);

  AssignmentConfig assignment;
  assignment.paradigm = Paradigm::kEda;
  assignment.schedule.num_layers = model_config.num_layers;
  assignment.schedule.evolve_after_layers = {1};
  assignment.distinct = true;
  LossConfig loss_config;

  std::vector<const Scene *> scenes;
  for (const Scene & scene : data.scenes) {
    scenes.push_back(&scene);
  }
  const ForwardPass pass = forward_pass(params, scenes);
  std::vector<std::vector<MixtureGrad>> grads;
  for (int s = 0; s < data.size(); ++s) {
    const auto matches =
      assign_layers(pass.outputs[s], predefined, data.scenes[s].gt_trajectory, assignment);
    grads.push_back(
      mixture_loss(pass.outputs[s], matches, data.scenes[s].gt_trajectory, loss_config).second);
  }
  const std::vector<double> batched = backward_from(params, pass, grads);

  std::vector<double> summed(params.theta.size(), 0.0);
  for (int s = 0; s < data.size(); ++s) {
    const auto outputs = forward(params, data.scenes[s]);
    const auto matches =
      assign_layers(outputs, predefined, data.scenes[s].gt_trajectory, assignment);
    const auto per_scene =
      mixture_loss(outputs, matches, data.scenes[s].gt_trajectory, loss_config).second;
    const auto grad = backward(params, data.scenes[s], per_scene);
    for (std::size_t i = 0; i < summed.size(); ++i) {
      summed[i] += grad[i];
    }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < summed.size(); ++i) {
    worst = std::max(worst, oracles::relative_error(batched[i], summed[i], 1e-8));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("training reduces evaluation error over the init")
{
  const Dataset train_data = tiny_dataset(256, 29);
  const Dataset eval_data = tiny_dataset(64, 31);
  const std::vector<Point2> anchors = tiny_anchors(train_data, 6);
  const ModelConfig model_config = tiny_model(train_data, 6);

  TrainConfig config;
  config.assignment.paradigm = Paradigm::kEda;
  config.assignment.schedule.num_layers = model_config.num_layers;
  config.assignment.schedule.evolve_after_layers = {2};
  config.assignment.distinct = true;
  config.epochs = 8;
  config.batch_size = 32;
  config.seed = 33;
  config.threads = 2;

  EvalConfig eval_config;
  eval_config.top_k = 4;

  const ModelParams init = init_model(model_config, predefined_anchor_set(anchors));
  const EvalResult before = evaluate_params(init, eval_data, eval_config);
  const TrainResult trained = train_model(train_data, anchors, model_config, config);
  const EvalResult after = evaluate_params(trained.params, eval_data, eval_config);

  CHECK(after.bundle.min_fde < before.bundle.min_fde);
  CHECK(trained.log.back().mean_loss.total < trained.log.front().mean_loss.total);
  REQUIRE(after.per_layer.min_fde.size() == static_cast<std::size_t>(model_config.num_layers));
}

TEST_CASE("median helper")
{
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("run_ablation on a 1x1 grid equals a single train+eval")
{
  const Dataset train_data = tiny_dataset(64, 37);
  const Dataset eval_data = tiny_dataset(32, 41);
  const std::vector<Point2> anchors = tiny_anchors(train_data, 4);

  AblationConfig config;
  config.evolve_times = {0};
  config.distinct = {false};
  config.cls_kinds = {ClsKind::kBce};
  config.seeds = {9};
  config.epochs = 2;
  config.batch_size = 32;
  config.hidden_dim = 16;
  config.num_layers = 3;
  config.eval.top_k = 4;
  config.score_mode = ScoreMode::kRank;

  const AblationResult result = run_ablation(train_data, eval_data, anchors, config);
  REQUIRE(result.medians.size() == 1);
  REQUIRE(result.per_layer_medians.size() == 3);

  ModelConfig model_config;
  model_config.context_dim = train_data.context_dim;
  model_config.hidden_dim = 16;
  model_config.num_layers = 3;
  model_config.num_components = 4;
  model_config.horizon = train_data.horizon;
  model_config.seed = 9;
  TrainConfig train_config;
  train_config.assignment.paradigm = Paradigm::kEda;
  train_config.assignment.schedule.num_layers = 3;
  train_config.epochs = 2;
  train_config.batch_size = 32;
  train_config.seed = 9;
  train_config.threads = 1;
  const TrainResult trained = train_model(train_data, anchors, model_config, train_config);
  EvalConfig eval_config;
  eval_config.top_k = 4;
  const EvalResult direct = evaluate_params(trained.params, eval_data, eval_config);

  CHECK(result.medians[0].min_fde == direct.bundle.min_fde);
  CHECK(result.medians[0].map == direct.bundle.map_rank);
  CHECK(result.per_layer_medians[2].min_fde == direct.per_layer.min_fde[2]);
}
