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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "eda/anchors.hpp"
#include "eda/config.hpp"
#include "eda/datagen.hpp"
#include "eda/report.hpp"
#include "eda/serialization.hpp"
#include "eda/train.hpp"

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<int> parse_evolve_layers(const std::string & text)
{
  std::vector<int> layers;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      continue;
    }
    layers.push_back(std::stoi(token));
  }
  return layers;
}

eda::GenConfig gen_config_from_file(const std::string & path)
{
  eda::GenConfig config;
  if (path.empty()) {
    return config;
  }
  eda::KeyValueConfig kv = eda::KeyValueConfig::from_file(path);
  config.num_scenes = static_cast<int>(kv.get_int("num_scenes", config.num_scenes));
  config.num_modes = static_cast<int>(kv.get_int("num_modes", config.num_modes));
  config.mode_prior_sharpness = kv.get_real("mode_prior_sharpness", config.mode_prior_sharpness);
  config.noise_sigma = kv.get_real("noise_sigma", config.noise_sigma);
  config.horizon = static_cast<int>(kv.get_int("horizon", config.horizon));
  config.dt = kv.get_real("dt", config.dt);
  config.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(config.seed)));
  config.speed_min = kv.get_real("speed_min", config.speed_min);
  config.speed_max = kv.get_real("speed_max", config.speed_max);
  config.turn_rates = kv.get_reals("turn_rates", config.turn_rates);
  config.speed_factors = kv.get_reals("speed_factors", config.speed_factors);
  kv.reject_unknown_keys();
  return config;
}

int cmd_gen_data(const std::string & config_path, const std::string & out_path)
{
  const eda::GenConfig config = gen_config_from_file(config_path);
  const eda::Dataset dataset = eda::generate_dataset(config);
  if (auto err = eda::validate(dataset)) {
    throw std::runtime_error("generated dataset failed validation: " + *err);
  }
  eda::save_dataset(out_path, dataset);

  std::vector<int> histogram(dataset.num_modes, 0);
  for (const eda::Scene & scene : dataset.scenes) {
    ++histogram[scene.latent_mode];
  }
  std::printf("wrote %d scenes to %s\n", dataset.size(), out_path.c_str());
  std::printf("mode histogram:");
  for (int count : histogram) {
    std::printf(" %d", count);
  }
  std::printf("\n");
  return kExitOk;
}

int cmd_make_anchors(
  const std::string & data_path, int k, std::uint64_t seed, int max_iters,
  const std::string & out_path)
{
  const eda::Dataset dataset = eda::load_dataset(data_path);
  std::vector<eda::Point2> endpoints;
  endpoints.reserve(dataset.size());
  for (const eda::Scene & scene : dataset.scenes) {
    endpoints.push_back(scene.gt_trajectory.endpoint());
  }
  const eda::KMeansResult result = eda::kmeans_endpoints(endpoints, k, seed, max_iters);
  eda::save_anchors(out_path, result.centroids, result.objective);
  std::printf("wrote %d anchors to %s\n", k, out_path.c_str());
  std::printf("k-means objective: %s after %d iterations\n",
              eda::format_real(result.objective).c_str(), result.iterations);
  return kExitOk;
}

struct TrainFlags
{
  std::string data;
  std::string anchors;
  std::string paradigm = "eda";
  std::string evolve_layers;
  bool evolve_layers_given = false;
  std::string distinct = "on";
  std::string cls = "bce";
  int epochs = 30;
  double learning_rate = 1e-3;
  int batch = 64;
  std::uint64_t seed = 1;
  int hidden = 64;
  int layers = 6;
  std::string out;
  std::string log;
  std::string config_id;
};

int cmd_train(const TrainFlags & flags)
{
  const eda::Paradigm paradigm = eda::paradigm_from_string(flags.paradigm);
  // The twice-evolving default applies only where a schedule is meaningful.
  std::string evolve_spec = flags.evolve_layers;
  if (!flags.evolve_layers_given && paradigm == eda::Paradigm::kEda) {
    evolve_spec = "2,4";
  }
  const std::vector<int> evolve_layers = parse_evolve_layers(evolve_spec);
  const bool distinct = flags.distinct == "on";
  if (flags.distinct != "on" && flags.distinct != "off") {
    throw std::invalid_argument("--distinct must be on or off");
  }
  if (paradigm == eda::Paradigm::kPrediction && distinct) {
    throw std::invalid_argument(
      "--distinct on is rejected with --paradigm pred: distinct selection is defined on anchors");
  }
  if (paradigm != eda::Paradigm::kEda && !evolve_layers.empty()) {
    throw std::invalid_argument(
      "--evolve-layers would be silently ignored with --paradigm " + flags.paradigm +
      "; pass --evolve-layers \"\" or use --paradigm eda");
  }
  if (flags.cls != "bce" && flags.cls != "ce") {
    throw std::invalid_argument("--cls must be bce or ce");
  }
  if (flags.config_id.find_first_of(" \t=") != std::string::npos) {
    throw std::invalid_argument("--config-id must not contain whitespace or '='");
  }

  const eda::Dataset dataset = eda::load_dataset(flags.data);
  auto [anchor_endpoints, objective] = eda::load_anchors(flags.anchors);
  (void)objective;

  eda::ModelConfig model_config;
  model_config.context_dim = dataset.context_dim;
  model_config.hidden_dim = flags.hidden;
  model_config.num_layers = flags.layers;
  model_config.num_components = static_cast<int>(anchor_endpoints.size());
  model_config.horizon = dataset.horizon;
  model_config.seed = flags.seed;

  eda::TrainConfig train_config;
  train_config.assignment.paradigm = paradigm;
  if (paradigm == eda::Paradigm::kEda) {
    train_config.assignment.schedule.num_layers = flags.layers;
    train_config.assignment.schedule.evolve_after_layers = evolve_layers;
    if (auto err = eda::validate(train_config.assignment.schedule)) {
      throw std::invalid_argument("--evolve-layers incompatible with --layers: " + *err);
    }
  }
  train_config.assignment.distinct = distinct;
  train_config.loss.cls_kind = flags.cls == "bce" ? eda::ClsKind::kBce : eda::ClsKind::kCe;
  train_config.epochs = flags.epochs;
  train_config.learning_rate = flags.learning_rate;
  train_config.batch_size = flags.batch;
  train_config.seed = flags.seed;

  const eda::TrainResult result =
    eda::train_model(dataset, anchor_endpoints, model_config, train_config);

  for (const eda::EpochLog & entry : result.log) {
    std::printf("epoch %3d  total %.6f  reg %.6f  cls %.6f\n", entry.epoch,
                entry.mean_loss.total, entry.mean_loss.reg, entry.mean_loss.cls);
  }

  eda::CheckpointMeta meta;
  meta.paradigm = flags.paradigm;
  meta.evolve_layers = paradigm == eda::Paradigm::kEda ? evolve_layers : std::vector<int>{};
  meta.distinct = distinct;
  meta.cls_kind = train_config.loss.cls_kind;
  meta.epochs = flags.epochs;
  meta.learning_rate = flags.learning_rate;
  meta.seed = flags.seed;
  meta.config_id = flags.config_id.empty()
                     ? flags.paradigm + "-e" + std::to_string(meta.evolve_layers.size()) + "-d" +
                         (distinct ? "1" : "0") + "-" + flags.cls + "-s" +
                         std::to_string(flags.seed)
                     : flags.config_id;
  eda::save_checkpoint(flags.out, result.params, meta);

  std::string log_path = flags.log;
  if (log_path.empty()) {
    const std::filesystem::path out(flags.out);
    log_path = (out.has_parent_path() ? out.parent_path() / "train_log.csv"
                                      : std::filesystem::path("train_log.csv"))
                 .string();
  }
  eda::save_train_log(log_path, result.log);
  std::printf("checkpoint written to %s (config %s)\n", flags.out.c_str(),
              meta.config_id.c_str());
  return kExitOk;
}

int cmd_eval(
  const std::string & data_path, const std::string & model_path, int k,
  const std::string & score_mode_name, double miss_threshold, const std::string & out_path,
  const std::string & layers_out, const std::string & config_id_override)
{
  const eda::ScoreMode mode = eda::score_mode_from_string(score_mode_name);
  const eda::Dataset dataset = eda::load_dataset(data_path);
  auto [params, meta] = eda::load_checkpoint(model_path);

  eda::EvalConfig eval_config;
  eval_config.top_k = k;
  eval_config.miss_threshold = miss_threshold;
  const eda::EvalResult result = eda::evaluate_params(params, dataset, eval_config);

  eda::MetricsRow row;
  row.config_id = config_id_override.empty() ? meta.config_id : config_id_override;
  row.evolve_times = static_cast<int>(meta.evolve_layers.size());
  row.distinct = meta.distinct;
  row.cls_kind = meta.cls_kind == eda::ClsKind::kBce ? "bce" : "ce";
  row.score_mode = score_mode_name;
  row.min_ade = result.bundle.min_ade;
  row.min_fde = result.bundle.min_fde;
  row.miss_rate = result.bundle.miss_rate;
  switch (mode) {
    case eda::ScoreMode::kOriginal:
      row.map = result.bundle.map_original;
      break;
    case eda::ScoreMode::kScaled:
      row.map = result.bundle.map_scaled;
      break;
    default:
      row.map = result.bundle.map_rank;
      break;
  }
  eda::save_metrics_csv(out_path, {row});

  if (!layers_out.empty()) {
    std::vector<eda::LayerMetricsRow> layer_rows;
    for (std::size_t l = 0; l < result.per_layer.min_fde.size(); ++l) {
      layer_rows.push_back({row.config_id, static_cast<int>(l + 1),
                            result.per_layer.min_fde[l], result.per_layer.miss_rate[l]});
    }
    eda::save_layer_metrics_csv(layers_out, layer_rows);
  }

  std::printf("config %s  minADE %.4f  minFDE %.4f  MissRate %.4f  mAP(%s) %.4f\n",
              row.config_id.c_str(), row.min_ade, row.min_fde, row.miss_rate,
              score_mode_name.c_str(), row.map);
  return kExitOk;
}

int cmd_ablate(const std::string & matrix_path, const std::string & out_dir)
{
  eda::KeyValueConfig kv = eda::KeyValueConfig::from_file(matrix_path);
  const std::string train_path = kv.get_string("train_data", "");
  const std::string eval_path = kv.get_string("eval_data", "");
  const std::string anchors_path = kv.get_string("anchors", "");
  if (train_path.empty() || eval_path.empty() || anchors_path.empty()) {
    throw std::invalid_argument("ablate matrix needs train_data, eval_data and anchors");
  }

  eda::AblationConfig config;
  config.evolve_times = kv.get_ints("evolve_times", config.evolve_times);
  config.out_dir = out_dir;
  {
    std::vector<std::string> distinct =
      kv.get_strings("distinct", std::vector<std::string>{"off", "on"});
    config.distinct.clear();
    for (const std::string & value : distinct) {
      if (value != "on" && value != "off") {
        throw std::invalid_argument("ablate matrix: distinct entries must be on/off");
      }
      config.distinct.push_back(value == "on");
    }
    std::vector<std::string> cls = kv.get_strings("cls", std::vector<std::string>{"bce"});
    config.cls_kinds.clear();
    for (const std::string & value : cls) {
      if (value != "bce" && value != "ce") {
        throw std::invalid_argument("ablate matrix: cls entries must be bce/ce");
      }
      config.cls_kinds.push_back(value == "bce" ? eda::ClsKind::kBce : eda::ClsKind::kCe);
    }
  }
  {
    std::vector<int> seeds = kv.get_ints("seeds", {1, 2, 3, 4, 5});
    config.seeds.assign(seeds.begin(), seeds.end());
  }
  config.epochs = static_cast<int>(kv.get_int("epochs", config.epochs));
  config.learning_rate = kv.get_real("lr", config.learning_rate);
  config.batch_size = static_cast<int>(kv.get_int("batch", config.batch_size));
  config.hidden_dim = static_cast<int>(kv.get_int("hidden", config.hidden_dim));
  config.num_layers = static_cast<int>(kv.get_int("layers", config.num_layers));
  config.eval.top_k = static_cast<int>(kv.get_int("k", config.eval.top_k));
  config.eval.miss_threshold = kv.get_real("miss_threshold", config.eval.miss_threshold);
  config.score_mode = eda::score_mode_from_string(kv.get_string("score_mode", "rank"));
  kv.reject_unknown_keys();

  const eda::Dataset train_data = eda::load_dataset(train_path);
  const eda::Dataset eval_data = eda::load_dataset(eval_path);
  auto [anchor_endpoints, objective] = eda::load_anchors(anchors_path);
  (void)objective;

  const eda::AblationResult result =
    eda::run_ablation(train_data, eval_data, anchor_endpoints, config);

  const std::filesystem::path dir(out_dir);
  eda::save_metrics_csv((dir / "metrics.csv").string(), result.medians);
  eda::save_layer_metrics_csv((dir / "per_layer.csv").string(), result.per_layer_medians);

  for (const eda::MetricsRow & row : result.medians) {
    std::printf("%-12s evolve %d distinct %-3s cls %-3s  minADE %.4f minFDE %.4f miss %.4f mAP %.4f\n",
                row.config_id.c_str(), row.evolve_times, row.distinct ? "on" : "off",
                row.cls_kind.c_str(), row.min_ade, row.min_fde, row.miss_rate, row.map);
  }
  std::printf("wrote %s and %s\n", (dir / "metrics.csv").string().c_str(),
              (dir / "per_layer.csv").string().c_str());
  return kExitOk;
}

int cmd_report(const std::string & in_path, const std::string & out_dir)
{
  const std::vector<eda::LayerMetricsRow> rows = eda::load_layer_metrics_csv(in_path);
  const int series = eda::write_report(rows, out_dir);
  std::printf("wrote %d series to %s\n", series, out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Mixture-model trajectory prediction lab: evolving and distinct anchors"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_path, anchors_path, model_path;
  std::string in_path, layers_out, config_id;

  auto * gen = app.add_subcommand("gen-data", "generate a synthetic multimodal dataset");
  gen->add_option("--config", config_path, "key=value generator config");
  gen->add_option("--out", out_path, "output scenes.edar path")->required();

  auto * anchors_cmd = app.add_subcommand("make-anchors", "fit intention points with k-means");
  int k_anchors = 16;
  std::uint64_t anchors_seed = 1;
  int max_iters = 100;
  anchors_cmd->add_option("--data", data_path, "training scenes.edar")->required();
  anchors_cmd->add_option("--k", k_anchors, "number of intention points");
  anchors_cmd->add_option("--seed", anchors_seed, "k-means++ seed");
  anchors_cmd->add_option("--max-iters", max_iters, "Lloyd iteration cap");
  anchors_cmd->add_option("--out", out_path, "output anchors.edar path")->required();

  TrainFlags train_flags;
  auto * train = app.add_subcommand("train", "train under a matching paradigm");
  train->add_option("--data", train_flags.data, "training scenes.edar")->required();
  train->add_option("--anchors", train_flags.anchors, "anchors.edar")->required();
  train->add_option("--paradigm", train_flags.paradigm, "pred|anchor|eda");
  train->add_option("--evolve-layers", train_flags.evolve_layers,
                    "comma list of 1-based layers whose outputs become anchors");
  train->add_option("--distinct", train_flags.distinct, "on|off distinct-anchor selection");
  train->add_option("--cls", train_flags.cls, "bce|ce classification loss");
  train->add_option("--epochs", train_flags.epochs, "training epochs");
  train->add_option("--lr", train_flags.learning_rate, "Adam learning rate");
  train->add_option("--batch", train_flags.batch, "mini-batch size");
  train->add_option("--seed", train_flags.seed, "init and shuffle seed");
  train->add_option("--hidden", train_flags.hidden, "hidden width");
  train->add_option("--layers", train_flags.layers, "decoder layers");
  train->add_option("--out", train_flags.out, "output checkpoint path")->required();
  train->add_option("--log", train_flags.log, "train_log.csv path");
  train->add_option("--config-id", train_flags.config_id, "config id stored in the checkpoint");

  auto * eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  int k_eval = 6;
  double miss_threshold = 2.0;
  std::string score_mode = "original";
  eval_cmd->add_option("--data", data_path, "evaluation scenes.edar")->required();
  eval_cmd->add_option("--model", model_path, "checkpoint model.edar")->required();
  eval_cmd->add_option("--k", k_eval, "predictions kept per scene");
  eval_cmd->add_option("--score-mode", score_mode, "original|scaled|rank");
  eval_cmd->add_option("--miss-threshold", miss_threshold, "endpoint miss threshold");
  eval_cmd->add_option("--out", out_path, "metrics.csv path")->required();
  eval_cmd->add_option("--layers-out", layers_out, "optional per-layer CSV path");
  eval_cmd->add_option("--config-id", config_id, "override the checkpoint's config id");

  auto * ablate = app.add_subcommand("ablate", "run the evolve/distinct/cls grid");
  std::string matrix_path;
  ablate->add_option("--matrix", matrix_path, "key=value grid config")->required();
  ablate->add_option("--out", out_path, "output directory")->required();

  auto * report = app.add_subcommand("report", "render per-layer CSV into SVG charts");
  report->add_option("--in", in_path, "per-layer CSV (config_id,layer,min_fde,miss_rate)")
    ->required();
  report->add_option("--out", out_path, "output directory for plots")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return kExitUsage;
  }
  train_flags.evolve_layers_given = train->get_option("--evolve-layers")->count() > 0;

  try {
    if (gen->parsed()) {
      return cmd_gen_data(config_path, out_path);
    }
    if (anchors_cmd->parsed()) {
      return cmd_make_anchors(data_path, k_anchors, anchors_seed, max_iters, out_path);
    }
    if (train->parsed()) {
      return cmd_train(train_flags);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(data_path, model_path, k_eval, score_mode, miss_threshold, out_path,
                      layers_out, config_id);
    }
    if (ablate->parsed()) {
      return cmd_ablate(matrix_path, out_path);
    }
    if (report->parsed()) {
      return cmd_report(in_path, out_path);
    }
  } catch (const std::invalid_argument & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
