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

#ifndef EDA__TRAIN_HPP_
#define EDA__TRAIN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "eda/anchors.hpp"
#include "eda/loss.hpp"
#include "eda/metrics.hpp"
#include "eda/model.hpp"
#include "eda/serialization.hpp"
#include "eda/types.hpp"

namespace eda
{

enum class Paradigm { kPrediction, kAnchor, kEda };

Paradigm paradigm_from_string(const std::string & name);
std::string to_string(Paradigm paradigm);

/// How positives (and neutrals) are picked per decoder layer during
/// training. Inference never reads any of this.
struct AssignmentConfig
{
  Paradigm paradigm = Paradigm::kEda;
  EvolveSchedule schedule;  // consulted for kEda only
  bool distinct = false;
  LengthMode length_mode = LengthMode::kArcLength;
};

/// Per-layer positive selection for one scene. Prediction-based matching
/// compares each layer's own mean trajectories with the ground truth;
/// anchor-based and EDA matching compare the layer's anchors (static or
/// evolved per the schedule), optionally reduced to the distinct subset
/// by score-sorted NMS before matching.
std::vector<MatchResult> assign_layers(
  const std::vector<MixtureOutput> & outputs, const AnchorSet & predefined,
  const Trajectory & gt, const AssignmentConfig & config);

struct TrainConfig
{
  AssignmentConfig assignment;
  LossConfig loss;
  int epochs = 30;
  double learning_rate = 1e-3;
  int batch_size = 64;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = EDA_THREADS or hardware concurrency
};

struct EpochLog
{
  int epoch = 0;
  LossBreakdown mean_loss;
};

struct TrainResult
{
  ModelParams params;
  std::vector<EpochLog> log;
};

/// Deterministic mini-batch Adam training of the refinement decoder
/// under the configured matching paradigm.
TrainResult train_model(
  const Dataset & data, const std::vector<Point2> & anchor_endpoints,
  const ModelConfig & model_config, const TrainConfig & train_config);

void save_train_log(const std::string & path, const std::vector<EpochLog> & log);

struct PerLayerMetrics
{
  std::vector<double> min_fde;    // mean over scenes of per-scene min over all components
  std::vector<double> miss_rate;  // fraction of scenes missing at that layer
};

struct EvalResult
{
  MetricsBundle bundle;
  PerLayerMetrics per_layer;
};

/// Top-K metrics on the final layer plus per-layer metrics over the
/// original components (no NMS), mirroring per-layer reporting.
EvalResult evaluate_params(
  const ModelParams & params, const Dataset & data, const EvalConfig & eval_config);

/// One cell of the ablation grid.
struct AblationConfig
{
  std::vector<int> evolve_times = {0, 1, 2, 5};
  std::vector<bool> distinct = {false, true};
  std::vector<ClsKind> cls_kinds = {ClsKind::kBce};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int epochs = 30;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int hidden_dim = 64;
  int num_layers = 6;
  EvalConfig eval;
  ScoreMode score_mode = ScoreMode::kRank;
  std::string out_dir;  // per-run artifacts land under <out_dir>/runs
};

struct AblationResult
{
  std::vector<MetricsRow> medians;                 // one row per grid cell
  std::vector<LayerMetricsRow> per_layer_medians;  // num_layers rows per cell
};

/// Trains and evaluates the full grid over all seeds (runs execute in
/// parallel, each single-threaded) and aggregates per-cell medians.
AblationResult run_ablation(
  const Dataset & train_data, const Dataset & eval_data,
  const std::vector<Point2> & anchor_endpoints, const AblationConfig & config);

/// EDA_THREADS env var, else hardware concurrency, at least 1.
int default_thread_count();

double median(std::vector<double> values);

std::string score_mode_name(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string & name);

}  // namespace eda

#endif  // EDA__TRAIN_HPP_
