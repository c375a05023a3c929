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

#ifndef EDA__MODEL_HPP_
#define EDA__MODEL_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "eda/loss.hpp"
#include "eda/types.hpp"

namespace eda
{

struct ModelConfig
{
  int context_dim = 7;
  int hidden_dim = 64;
  int num_layers = 6;
  int num_components = 16;
  int horizon = 16;
  std::uint64_t seed = 1;
  GaussLimits limits;
  double delta_scale = 10.0;  // meters of mean shift per unit head output
};

/// Byte offsets of each parameter block inside the flat theta vector.
/// Shapes (column-major):
///   enc_w      hidden x context_dim
///   enc_b      hidden
///   queries    hidden x num_components
///   per layer: refine_w1 hidden x input_dim, refine_b1 hidden,
///              refine_w2 out_dim x hidden,   refine_b2 out_dim,
///              score_w1  hidden x input_dim, score_b1  hidden,
///              score_w2  hidden,             score_b2  1
/// with input_dim = 2*hidden + 2 (context feature, query, previous
/// endpoint) and out_dim = 5*horizon (per step: dmu_x, dmu_y,
/// log_sigma_x, log_sigma_y, rho_raw).
struct ParamLayout
{
  int hidden = 0;
  int context_dim = 0;
  int num_components = 0;
  int num_layers = 0;
  int input_dim = 0;
  int out_dim = 0;
  int enc_w = 0;
  int enc_b = 0;
  int queries = 0;
  struct Layer
  {
    int refine_w1 = 0;
    int refine_b1 = 0;
    int refine_w2 = 0;
    int refine_b2 = 0;
    int score_w1 = 0;
    int score_b1 = 0;
    int score_w2 = 0;
    int score_b2 = 0;
  };
  std::vector<Layer> layers;
  int total = 0;

  static ParamLayout from(const ModelConfig & config);
};

/// Trainable weights as one flat array plus the fixed intention-point
/// anchors the decoder refines from. Anchors are constants, not
/// parameters: they seed the base trajectories and the query init.
struct ModelParams
{
  ModelConfig config;
  std::vector<Point2> anchor_endpoints;
  double coord_scale = 1.0;
  std::vector<double> theta;

  ParamLayout layout() const { return ParamLayout::from(config); }
};

ModelParams init_model(const ModelConfig & config, const AnchorSet & predefined);

/// Cached intermediate activations of one batched forward evaluation,
/// consumed by backward_from.
struct ForwardPass
{
  std::vector<const Scene *> scenes;
  Eigen::MatrixXd context;          // context_dim x B
  Eigen::MatrixXd hidden_context;   // hidden x B (post-tanh)
  struct Layer
  {
    Eigen::MatrixXd input;          // input_dim x (B*N)
    Eigen::MatrixXd hidden_refine;  // hidden x (B*N), post-tanh
    Eigen::MatrixXd hidden_score;   // hidden x (B*N), post-tanh
    Eigen::MatrixXd ls_pass;        // 2T x (B*N), 1 where clamp inactive
  };
  std::vector<Layer> layers;
  std::vector<std::vector<MixtureOutput>> outputs;  // [scene][layer]
};

/// Deterministic feed-forward decode of a batch of scenes. Layer 1
/// predicts offsets from the anchor-endpoint base trajectories; later
/// layers residually refine the previous means and re-score. The
/// computation never sees matching or evolving configuration.
ForwardPass forward_pass(const ModelParams & params, const std::vector<const Scene *> & scenes);

std::vector<MixtureOutput> forward(const ModelParams & params, const Scene & scene);

/// Exact reverse-mode gradients of forward composed with the given
/// per-scene, per-layer output gradients; summed over the batch into one
/// flat vector aligned with theta.
std::vector<double> backward_from(
  const ModelParams & params, const ForwardPass & pass,
  const std::vector<std::vector<MixtureGrad>> & output_grads);

std::vector<double> backward(
  const ModelParams & params, const Scene & scene,
  const std::vector<MixtureGrad> & output_grads);

struct AdamState
{
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState make_adam_state(const ModelParams & params);

/// Standard bias-corrected Adam update. Throws on non-finite gradients.
void adam_step(
  ModelParams & params, const std::vector<double> & grads, AdamState & state, double lr);

}  // namespace eda

#endif  // EDA__MODEL_HPP_
