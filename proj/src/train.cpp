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

#include "eda/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "eda/assignment.hpp"
#include "eda/geometry.hpp"
#include "eda/rng.hpp"

namespace eda
{
namespace
{

// Scenes per gradient work unit; fixed so the reduction order (and the
// resulting bits) never depends on the thread count.
constexpr int kSubBatch = 32;

void run_indexed_jobs(int job_count, int threads, const std::function<void(int)> & job)
{
  threads = std::max(1, std::min(threads, job_count));
  if (threads == 1) {
    for (int i = 0; i < job_count; ++i) {
      job(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= job_count) {
          return;
        }
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto & worker : workers) {
    worker.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

double top_component_sigma(const MixtureOutput & output, LengthMode length_mode)
{
  const int top = score_order(output.score_logits).front();
  return nms_threshold(
    trajectory_length(mean_trajectory(output.components[top], output.dt), length_mode));
}

}  // namespace

Paradigm paradigm_from_string(const std::string & name)
{
  if (name == "pred") {
    return Paradigm::kPrediction;
  }
  if (name == "anchor") {
    return Paradigm::kAnchor;
  }
  if (name == "eda") {
    return Paradigm::kEda;
  }
  throw std::invalid_argument("unknown paradigm '" + name + "' (pred|anchor|eda)");
}

std::string to_string(Paradigm paradigm)
{
  switch (paradigm) {
    case Paradigm::kPrediction:
      return "pred";
    case Paradigm::kAnchor:
      return "anchor";
    default:
      return "eda";
  }
}

std::vector<MatchResult> assign_layers(
  const std::vector<MixtureOutput> & outputs, const AnchorSet & predefined,
  const Trajectory & gt, const AssignmentConfig & config)
{
  const int num_layers = static_cast<int>(outputs.size());
  std::vector<MatchResult> matches;
  matches.reserve(num_layers);

  if (config.paradigm == Paradigm::kPrediction) {
    if (config.distinct) {
      throw std::invalid_argument(
        "distinct selection is defined on anchors; prediction-based matching has none");
    }
    for (const MixtureOutput & output : outputs) {
      matches.push_back(match_prediction_based(output, gt));
    }
    return matches;
  }

  // Static anchors are EDA with an empty schedule.
  EvolveSchedule schedule;
  schedule.num_layers = num_layers;
  if (config.paradigm == Paradigm::kEda) {
    schedule = config.schedule;
    if (schedule.num_layers != num_layers) {
      throw std::invalid_argument("assign_layers: schedule layer count mismatch");
    }
  }

  for (int layer = 1; layer <= num_layers; ++layer) {
    const MixtureOutput & output = outputs[layer - 1];
    const AnchorSet anchors = anchors_for_layer(layer, predefined, outputs, schedule);
    if (config.distinct) {
      const double sigma = top_component_sigma(output, config.length_mode);
      matches.push_back(
        match_eda(anchors, select_distinct(anchors, output.score_logits, sigma), gt));
    } else {
      matches.push_back(
        match_eda(anchors, std::vector<bool>(anchors.size(), true), gt));
    }
  }
  return matches;
}

int default_thread_count()
{
  if (const char * env = std::getenv("EDA_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) {
      return value;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

TrainResult train_model(
  const Dataset & data, const std::vector<Point2> & anchor_endpoints,
  const ModelConfig & model_config, const TrainConfig & train_config)
{
  if (data.size() == 0) {
    throw std::invalid_argument("train_model: empty dataset");
  }
  if (data.horizon != model_config.horizon) {
    throw std::invalid_argument("train_model: dataset horizon differs from model horizon");
  }
  if (data.context_dim != model_config.context_dim) {
    throw std::invalid_argument("train_model: dataset context_dim differs from model config");
  }
  if (static_cast<int>(anchor_endpoints.size()) != model_config.num_components) {
    throw std::invalid_argument("train_model: anchor count differs from num_components");
  }
  if (train_config.assignment.paradigm == Paradigm::kEda) {
    const EvolveSchedule & schedule = train_config.assignment.schedule;
    if (schedule.num_layers != model_config.num_layers) {
      throw std::invalid_argument("train_model: evolve schedule incompatible with num_layers");
    }
    if (auto err = validate(schedule)) {
      throw std::invalid_argument("train_model: " + *err);
    }
  }
  if (train_config.assignment.paradigm == Paradigm::kPrediction &&
      train_config.assignment.distinct) {
    throw std::invalid_argument(
      "distinct selection is defined on anchors; prediction-based matching has none");
  }

  const AnchorSet predefined = predefined_anchor_set(anchor_endpoints);
  TrainResult result;
  result.params = init_model(model_config, predefined);
  AdamState adam = make_adam_state(result.params);

  LossConfig loss_config = train_config.loss;
  if (loss_config.per_layer_weights.empty()) {
    loss_config.per_layer_weights.assign(model_config.num_layers, 1.0);
  }

  const int threads =
    train_config.threads > 0 ? train_config.threads : default_thread_count();
  const int num_scenes = data.size();
  const int batch_size = std::min(train_config.batch_size, num_scenes);

  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    Rng shuffle_rng(derived_seed(train_config.seed, static_cast<std::uint64_t>(epoch)));
    const std::vector<int> order = shuffle_rng.permutation(num_scenes);

    LossBreakdown epoch_sum;
    epoch_sum.per_layer.assign(model_config.num_layers, LayerLoss{});

    for (int start = 0; start < num_scenes; start += batch_size) {
      const int count = std::min(batch_size, num_scenes - start);
      const int sub_batches = (count + kSubBatch - 1) / kSubBatch;

      std::vector<std::vector<double>> grads(sub_batches);
      std::vector<LossBreakdown> losses(sub_batches);

      run_indexed_jobs(sub_batches, threads, [&](int sub) {
        const int sub_start = start + sub * kSubBatch;
        const int sub_count = std::min(kSubBatch, start + count - sub_start);
        std::vector<const Scene *> scenes(sub_count);
        for (int i = 0; i < sub_count; ++i) {
          scenes[i] = &data.scenes[order[sub_start + i]];
        }
        const ForwardPass pass = forward_pass(result.params, scenes);

        LossBreakdown sum;
        sum.per_layer.assign(model_config.num_layers, LayerLoss{});
        std::vector<std::vector<MixtureGrad>> output_grads(sub_count);
        for (int i = 0; i < sub_count; ++i) {
          const std::vector<MatchResult> matches = assign_layers(
            pass.outputs[i], predefined, scenes[i]->gt_trajectory,
            train_config.assignment);
          auto [breakdown, grad] =
            mixture_loss(pass.outputs[i], matches, scenes[i]->gt_trajectory, loss_config);
          output_grads[i] = std::move(grad);
          sum.total += breakdown.total;
          sum.reg += breakdown.reg;
          sum.cls += breakdown.cls;
          for (int l = 0; l < model_config.num_layers; ++l) {
            sum.per_layer[l].reg += breakdown.per_layer[l].reg;
            sum.per_layer[l].cls += breakdown.per_layer[l].cls;
          }
        }
        grads[sub] = backward_from(result.params, pass, output_grads);
        losses[sub] = std::move(sum);
      });

      // Deterministic reduction in sub-batch order.
      std::vector<double> & total_grad = grads.front();
      for (int sub = 1; sub < sub_batches; ++sub) {
        for (std::size_t i = 0; i < total_grad.size(); ++i) {
          total_grad[i] += grads[sub][i];
        }
      }
      const double inv_count = 1.0 / static_cast<double>(count);
      for (double & g : total_grad) {
        g *= inv_count;
      }
      adam_step(result.params, total_grad, adam, train_config.learning_rate);

      for (const LossBreakdown & loss : losses) {
        epoch_sum.total += loss.total;
        epoch_sum.reg += loss.reg;
        epoch_sum.cls += loss.cls;
        for (int l = 0; l < model_config.num_layers; ++l) {
          epoch_sum.per_layer[l].reg += loss.per_layer[l].reg;
          epoch_sum.per_layer[l].cls += loss.per_layer[l].cls;
        }
      }
    }

    const double inv_scenes = 1.0 / static_cast<double>(num_scenes);
    EpochLog log;
    log.epoch = epoch;
    log.mean_loss.total = epoch_sum.total * inv_scenes;
    log.mean_loss.reg = epoch_sum.reg * inv_scenes;
    log.mean_loss.cls = epoch_sum.cls * inv_scenes;
    log.mean_loss.per_layer.resize(model_config.num_layers);
    for (int l = 0; l < model_config.num_layers; ++l) {
      log.mean_loss.per_layer[l].reg = epoch_sum.per_layer[l].reg * inv_scenes;
      log.mean_loss.per_layer[l].cls = epoch_sum.per_layer[l].cls * inv_scenes;
    }
    result.log.push_back(std::move(log));
  }
  return result;
}

void save_train_log(const std::string & path, const std::vector<EpochLog> & log)
{
  std::ostringstream out;
  out << "epoch,total,reg,cls";
  const int layers = log.empty() ? 0 : static_cast<int>(log.front().mean_loss.per_layer.size());
  for (int l = 1; l <= layers; ++l) {
    out << ",reg_l" << l << ",cls_l" << l;
  }
  out << '\n';
  for (const EpochLog & entry : log) {
    out << entry.epoch << ',' << format_real(entry.mean_loss.total) << ','
        << format_real(entry.mean_loss.reg) << ',' << format_real(entry.mean_loss.cls);
    for (const LayerLoss & layer : entry.mean_loss.per_layer) {
      out << ',' << format_real(layer.reg) << ',' << format_real(layer.cls);
    }
    out << '\n';
  }
  atomic_write_text(path, out.str());
}

EvalResult evaluate_params(
  const ModelParams & params, const Dataset & data, const EvalConfig & eval_config)
{
  if (data.size() == 0) {
    throw std::invalid_argument("evaluate_params: empty dataset");
  }
  if (data.horizon != params.config.horizon || data.context_dim != params.config.context_dim) {
    throw std::invalid_argument("evaluate_params: dataset dims differ from the checkpoint");
  }

  const int num_scenes = data.size();
  const int num_layers = params.config.num_layers;
  EvalResult result;
  result.per_layer.min_fde.assign(num_layers, 0.0);
  result.per_layer.miss_rate.assign(num_layers, 0.0);

  std::vector<SelectedPredictions> selections(num_scenes);
  std::vector<Trajectory> gts(num_scenes);

  constexpr int kChunk = 64;
  for (int start = 0; start < num_scenes; start += kChunk) {
    const int count = std::min(kChunk, num_scenes - start);
    std::vector<const Scene *> scenes(count);
    for (int i = 0; i < count; ++i) {
      scenes[i] = &data.scenes[start + i];
    }
    const ForwardPass pass = forward_pass(params, scenes);
    for (int i = 0; i < count; ++i) {
      const int s = start + i;
      gts[s] = scenes[i]->gt_trajectory;
      selections[s] = select_top_k(
        pass.outputs[i].back(), eval_config.top_k, eval_config.length_mode);
      const Point2 & gt_end = gts[s].endpoint();
      for (int l = 0; l < num_layers; ++l) {
        double best = std::numeric_limits<double>::infinity();
        for (const GaussianTrajectory & component : pass.outputs[i][l].components) {
          best = std::min(
            best, euclidean({component.steps.back().mu_x, component.steps.back().mu_y}, gt_end));
        }
        result.per_layer.min_fde[l] += best;
        if (best > eval_config.miss_threshold) {
          result.per_layer.miss_rate[l] += 1.0;
        }
      }
    }
  }
  for (int l = 0; l < num_layers; ++l) {
    result.per_layer.min_fde[l] /= num_scenes;
    result.per_layer.miss_rate[l] /= num_scenes;
  }
  result.bundle = compute_metrics(selections, gts, eval_config.miss_threshold);
  return result;
}

double median(std::vector<double> values)
{
  if (values.empty()) {
    throw std::invalid_argument("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) {
    return values[n / 2];
  }
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string score_mode_name(ScoreMode mode)
{
  switch (mode) {
    case ScoreMode::kOriginal:
      return "original";
    case ScoreMode::kScaled:
      return "scaled";
    default:
      return "rank";
  }
}

ScoreMode score_mode_from_string(const std::string & name)
{
  if (name == "original") {
    return ScoreMode::kOriginal;
  }
  if (name == "scaled") {
    return ScoreMode::kScaled;
  }
  if (name == "rank") {
    return ScoreMode::kRank;
  }
  throw std::invalid_argument("unknown score mode '" + name + "' (original|scaled|rank)");
}

AblationResult run_ablation(
  const Dataset & train_data, const Dataset & eval_data,
  const std::vector<Point2> & anchor_endpoints, const AblationConfig & config)
{
  struct Cell
  {
    int evolve_times = 0;
    bool distinct = false;
    ClsKind cls = ClsKind::kBce;
    std::string id;
  };
  std::vector<Cell> cells;
  for (int evolve : config.evolve_times) {
    for (bool distinct : config.distinct) {
      for (ClsKind cls : config.cls_kinds) {
        Cell cell;
        cell.evolve_times = evolve;
        cell.distinct = distinct;
        cell.cls = cls;
        cell.id = "e" + std::to_string(evolve) + "-d" + (distinct ? "1" : "0") + "-" +
                  (cls == ClsKind::kBce ? "bce" : "ce");
        cells.push_back(std::move(cell));
      }
    }
  }

  const int num_seeds = static_cast<int>(config.seeds.size());
  const int num_jobs = static_cast<int>(cells.size()) * num_seeds;
  std::vector<EvalResult> evals(num_jobs);

  run_indexed_jobs(num_jobs, default_thread_count(), [&](int job) {
    const Cell & cell = cells[job / num_seeds];
    const std::uint64_t seed = config.seeds[job % num_seeds];

    ModelConfig model_config;
    model_config.context_dim = train_data.context_dim;
    model_config.hidden_dim = config.hidden_dim;
    model_config.num_layers = config.num_layers;
    model_config.num_components = static_cast<int>(anchor_endpoints.size());
    model_config.horizon = train_data.horizon;
    model_config.seed = seed;

    TrainConfig train_config;
    train_config.assignment.paradigm = Paradigm::kEda;
    train_config.assignment.schedule = standard_schedule(cell.evolve_times, config.num_layers);
    train_config.assignment.distinct = cell.distinct;
    train_config.assignment.length_mode = config.eval.length_mode;
    train_config.loss.cls_kind = cell.cls;
    train_config.epochs = config.epochs;
    train_config.learning_rate = config.learning_rate;
    train_config.batch_size = config.batch_size;
    train_config.seed = seed;
    train_config.threads = 1;  // jobs already run in parallel

    const TrainResult trained =
      train_model(train_data, anchor_endpoints, model_config, train_config);
    evals[job] = evaluate_params(trained.params, eval_data, config.eval);

    if (!config.out_dir.empty()) {
      const std::string run_id = cell.id + "-s" + std::to_string(seed);
      const std::filesystem::path run_dir =
        std::filesystem::path(config.out_dir) / "runs" / run_id;
      CheckpointMeta meta;
      meta.config_id = run_id;
      meta.paradigm = "eda";
      meta.evolve_layers = train_config.assignment.schedule.evolve_after_layers;
      meta.distinct = cell.distinct;
      meta.cls_kind = cell.cls;
      meta.epochs = config.epochs;
      meta.learning_rate = config.learning_rate;
      meta.seed = seed;
      save_checkpoint((run_dir / "model.edar").string(), trained.params, meta);
      save_train_log((run_dir / "train_log.csv").string(), trained.log);
    }
  });

  AblationResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell & cell = cells[c];
    std::vector<double> ade, fde, miss, ap;
    for (int s = 0; s < num_seeds; ++s) {
      const MetricsBundle & bundle = evals[c * num_seeds + s].bundle;
      ade.push_back(bundle.min_ade);
      fde.push_back(bundle.min_fde);
      miss.push_back(bundle.miss_rate);
      switch (config.score_mode) {
        case ScoreMode::kOriginal:
          ap.push_back(bundle.map_original);
          break;
        case ScoreMode::kScaled:
          ap.push_back(bundle.map_scaled);
          break;
        default:
          ap.push_back(bundle.map_rank);
          break;
      }
    }
    MetricsRow row;
    row.config_id = cell.id;
    row.evolve_times = cell.evolve_times;
    row.distinct = cell.distinct;
    row.cls_kind = cell.cls == ClsKind::kBce ? "bce" : "ce";
    row.score_mode = score_mode_name(config.score_mode);
    row.min_ade = median(ade);
    row.min_fde = median(fde);
    row.miss_rate = median(miss);
    row.map = median(ap);
    result.medians.push_back(std::move(row));

    for (int l = 0; l < config.num_layers; ++l) {
      std::vector<double> layer_fde, layer_miss;
      for (int s = 0; s < num_seeds; ++s) {
        layer_fde.push_back(evals[c * num_seeds + s].per_layer.min_fde[l]);
        layer_miss.push_back(evals[c * num_seeds + s].per_layer.miss_rate[l]);
      }
      LayerMetricsRow layer_row;
      layer_row.config_id = cell.id;
      layer_row.layer = l + 1;
      layer_row.min_fde = median(layer_fde);
      layer_row.miss_rate = median(layer_miss);
      result.per_layer_medians.push_back(std::move(layer_row));
    }
  }
  return result;
}

}  // namespace eda
