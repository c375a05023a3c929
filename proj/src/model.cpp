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

#include "eda/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eda/rng.hpp"

namespace eda
{
namespace
{

using Eigen::MatrixXd;
using Eigen::VectorXd;

using MatMap = Eigen::Map<MatrixXd>;
using ConstMatMap = Eigen::Map<const MatrixXd>;
using VecMap = Eigen::Map<VectorXd>;
using ConstVecMap = Eigen::Map<const VectorXd>;

struct LayerMaps
{
  ConstMatMap refine_w1;
  ConstVecMap refine_b1;
  ConstMatMap refine_w2;
  ConstVecMap refine_b2;
  ConstMatMap score_w1;
  ConstVecMap score_b1;
  ConstVecMap score_w2;
  double score_b2;
};

LayerMaps layer_maps(const std::vector<double> & theta, const ParamLayout & l, int layer)
{
  const auto & b = l.layers[layer];
  return {
    ConstMatMap(theta.data() + b.refine_w1, l.hidden, l.input_dim),
    ConstVecMap(theta.data() + b.refine_b1, l.hidden),
    ConstMatMap(theta.data() + b.refine_w2, l.out_dim, l.hidden),
    ConstVecMap(theta.data() + b.refine_b2, l.out_dim),
    ConstMatMap(theta.data() + b.score_w1, l.hidden, l.input_dim),
    ConstVecMap(theta.data() + b.score_b1, l.hidden),
    ConstVecMap(theta.data() + b.score_w2, l.hidden),
    theta[b.score_b2]};
}

void fill_uniform(Rng & rng, double * data, int count, int fan_in)
{
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (int i = 0; i < count; ++i) {
    data[i] = rng.uniform(-bound, bound);
  }
}

}  // namespace

ParamLayout ParamLayout::from(const ModelConfig & config)
{
  ParamLayout l;
  l.hidden = config.hidden_dim;
  l.context_dim = config.context_dim;
  l.num_components = config.num_components;
  l.num_layers = config.num_layers;
  l.input_dim = 2 * config.hidden_dim + 2;
  l.out_dim = 5 * config.horizon;

  int offset = 0;
  auto take = [&offset](int count) {
    const int at = offset;
    offset += count;
    return at;
  };
  l.enc_w = take(l.hidden * l.context_dim);
  l.enc_b = take(l.hidden);
  l.queries = take(l.hidden * l.num_components);
  l.layers.resize(config.num_layers);
  for (auto & layer : l.layers) {
    layer.refine_w1 = take(l.hidden * l.input_dim);
    layer.refine_b1 = take(l.hidden);
    layer.refine_w2 = take(l.out_dim * l.hidden);
    layer.refine_b2 = take(l.out_dim);
    layer.score_w1 = take(l.hidden * l.input_dim);
    layer.score_b1 = take(l.hidden);
    layer.score_w2 = take(l.hidden);
    layer.score_b2 = take(1);
  }
  l.total = offset;
  return l;
}

ModelParams init_model(const ModelConfig & config, const AnchorSet & predefined)
{
  if (predefined.size() != config.num_components) {
    throw std::invalid_argument("init_model: anchor count differs from num_components");
  }
  if (config.context_dim < 1 || config.hidden_dim < 1 || config.num_layers < 1 ||
      config.num_components < 2 || config.horizon < 1) {
    throw std::invalid_argument("init_model: all config dims must be positive");
  }

  ModelParams params;
  params.config = config;
  params.anchor_endpoints.reserve(config.num_components);
  double max_norm = 1.0;
  for (const auto & anchor : predefined.anchors) {
    params.anchor_endpoints.push_back(anchor.endpoint);
    max_norm = std::max(max_norm, std::hypot(anchor.endpoint.x, anchor.endpoint.y));
  }
  params.coord_scale = max_norm;

  const ParamLayout layout = params.layout();
  params.theta.assign(layout.total, 0.0);
  Rng rng(splitmix64(config.seed));

  fill_uniform(rng, params.theta.data() + layout.enc_w, layout.hidden * layout.context_dim,
               layout.context_dim);

  // Queries: linear embedding of the scaled anchor endpoints.
  MatrixXd embed(layout.hidden, 2);
  fill_uniform(rng, embed.data(), layout.hidden * 2, 2);
  MatMap queries(params.theta.data() + layout.queries, layout.hidden, layout.num_components);
  for (int i = 0; i < layout.num_components; ++i) {
    const Point2 & a = params.anchor_endpoints[i];
    queries.col(i) =
      embed * Eigen::Vector2d(a.x / params.coord_scale, a.y / params.coord_scale);
  }

  for (int layer = 0; layer < config.num_layers; ++layer) {
    const auto & b = layout.layers[layer];
    fill_uniform(rng, params.theta.data() + b.refine_w1, layout.hidden * layout.input_dim,
                 layout.input_dim);
    fill_uniform(rng, params.theta.data() + b.refine_w2, layout.out_dim * layout.hidden,
                 layout.hidden);
    fill_uniform(rng, params.theta.data() + b.score_w1, layout.hidden * layout.input_dim,
                 layout.input_dim);
    fill_uniform(rng, params.theta.data() + b.score_w2, layout.hidden, layout.hidden);
  }
  return params;
}

ForwardPass forward_pass(const ModelParams & params, const std::vector<const Scene *> & scenes)
{
  const ModelConfig & cfg = params.config;
  const ParamLayout layout = params.layout();
  const int batch = static_cast<int>(scenes.size());
  const int n = cfg.num_components;
  const int horizon = cfg.horizon;
  const int cols = batch * n;

  if (batch == 0) {
    throw std::invalid_argument("forward_pass: empty batch");
  }
  for (const Scene * scene : scenes) {
    if (static_cast<int>(scene->context.size()) != cfg.context_dim) {
      throw std::invalid_argument("forward_pass: context dimension mismatch");
    }
    if (scene->gt_trajectory.horizon() != horizon) {
      throw std::invalid_argument("forward_pass: scene horizon differs from model horizon");
    }
  }

  ForwardPass pass;
  pass.scenes = scenes;
  pass.context.resize(cfg.context_dim, batch);
  for (int s = 0; s < batch; ++s) {
    for (int d = 0; d < cfg.context_dim; ++d) {
      pass.context(d, s) = scenes[s]->context[d];
    }
  }

  ConstMatMap enc_w(params.theta.data() + layout.enc_w, layout.hidden, layout.context_dim);
  ConstVecMap enc_b(params.theta.data() + layout.enc_b, layout.hidden);
  ConstMatMap queries(params.theta.data() + layout.queries, layout.hidden, n);

  pass.hidden_context = (((enc_w * pass.context).colwise() + enc_b).array().tanh()).matrix();

  // Column (s*n + i) holds scene s, component i throughout.
  MatrixXd mu(2 * horizon, cols);  // running means
  MatrixXd prev_endpoint_scaled(2, cols);
  for (int s = 0; s < batch; ++s) {
    for (int i = 0; i < n; ++i) {
      const Point2 & a = params.anchor_endpoints[i];
      const int c = s * n + i;
      for (int t = 0; t < horizon; ++t) {
        const double ramp = static_cast<double>(t + 1) / static_cast<double>(horizon);
        mu(2 * t, c) = a.x * ramp;
        mu(2 * t + 1, c) = a.y * ramp;
      }
      prev_endpoint_scaled(0, c) = a.x / params.coord_scale;
      prev_endpoint_scaled(1, c) = a.y / params.coord_scale;
    }
  }

  pass.layers.resize(cfg.num_layers);
  pass.outputs.assign(batch, std::vector<MixtureOutput>(cfg.num_layers));

  for (int layer = 0; layer < cfg.num_layers; ++layer) {
    const LayerMaps maps = layer_maps(params.theta, layout, layer);
    ForwardPass::Layer & cache = pass.layers[layer];

    cache.input.resize(layout.input_dim, cols);
    for (int s = 0; s < batch; ++s) {
      for (int i = 0; i < n; ++i) {
        const int c = s * n + i;
        cache.input.col(c).head(layout.hidden) = pass.hidden_context.col(s);
        cache.input.col(c).segment(layout.hidden, layout.hidden) = queries.col(i);
      }
    }
    cache.input.bottomRows(2) = prev_endpoint_scaled;

    cache.hidden_refine =
      (((maps.refine_w1 * cache.input).colwise() + maps.refine_b1).array().tanh()).matrix();
    MatrixXd head = (maps.refine_w2 * cache.hidden_refine).colwise() + maps.refine_b2;

    cache.hidden_score =
      (((maps.score_w1 * cache.input).colwise() + maps.score_b1).array().tanh()).matrix();
    Eigen::RowVectorXd scores =
      (maps.score_w2.transpose() * cache.hidden_score).array() + maps.score_b2;

    cache.ls_pass.resize(2 * horizon, cols);

    for (int t = 0; t < horizon; ++t) {
      mu.row(2 * t) += cfg.delta_scale * head.row(5 * t);
      mu.row(2 * t + 1) += cfg.delta_scale * head.row(5 * t + 1);
    }
    prev_endpoint_scaled = mu.bottomRows(2) / params.coord_scale;

    for (int s = 0; s < batch; ++s) {
      MixtureOutput & out = pass.outputs[s][layer];
      out.layer_index = layer + 1;
      out.dt = scenes[s]->gt_trajectory.dt;
      out.components.resize(n);
      out.score_logits.resize(n);
      for (int i = 0; i < n; ++i) {
        const int c = s * n + i;
        out.score_logits[i] = scores(c);
        GaussianTrajectory & component = out.components[i];
        component.steps.resize(horizon);
        for (int t = 0; t < horizon; ++t) {
          GaussStep & step = component.steps[t];
          step.mu_x = mu(2 * t, c);
          step.mu_y = mu(2 * t + 1, c);
          const double raw_x = head(5 * t + 2, c);
          const double raw_y = head(5 * t + 3, c);
          step.log_sigma_x =
            std::clamp(raw_x, cfg.limits.log_sigma_min, cfg.limits.log_sigma_max);
          step.log_sigma_y =
            std::clamp(raw_y, cfg.limits.log_sigma_min, cfg.limits.log_sigma_max);
          cache.ls_pass(2 * t, c) = (raw_x == step.log_sigma_x) ? 1.0 : 0.0;
          cache.ls_pass(2 * t + 1, c) = (raw_y == step.log_sigma_y) ? 1.0 : 0.0;
          step.rho_raw = head(5 * t + 4, c);
        }
      }
    }
  }
  return pass;
}

std::vector<MixtureOutput> forward(const ModelParams & params, const Scene & scene)
{
  return forward_pass(params, {&scene}).outputs.front();
}

std::vector<double> backward_from(
  const ModelParams & params, const ForwardPass & pass,
  const std::vector<std::vector<MixtureGrad>> & output_grads)
{
  const ModelConfig & cfg = params.config;
  const ParamLayout layout = params.layout();
  const int batch = static_cast<int>(pass.scenes.size());
  const int n = cfg.num_components;
  const int horizon = cfg.horizon;
  const int cols = batch * n;

  if (static_cast<int>(output_grads.size()) != batch) {
    throw std::invalid_argument("backward: output grads batch size mismatch");
  }
  for (const auto & per_layer : output_grads) {
    if (static_cast<int>(per_layer.size()) != cfg.num_layers) {
      throw std::invalid_argument("backward: output grads layer count mismatch");
    }
  }

  // Accumulate into Eigen-owned (max-aligned) storage: mapping a plain
  // vector here lets the allocation's 32-byte phase decide which lanes
  // take the FMA path, and same-process reruns then differ in the last
  // ulp. Copied out once at the end.
  VectorXd grad_theta = VectorXd::Zero(layout.total);
  MatMap g_enc_w(grad_theta.data() + layout.enc_w, layout.hidden, layout.context_dim);
  VecMap g_enc_b(grad_theta.data() + layout.enc_b, layout.hidden);
  MatMap g_queries(grad_theta.data() + layout.queries, layout.hidden, n);

  MatrixXd d_mu = MatrixXd::Zero(2 * horizon, cols);  // grad w.r.t. current layer means
  VectorXd d_hidden_context_total = VectorXd::Zero(layout.hidden * batch);
  Eigen::Map<MatrixXd> d_hidden_context(d_hidden_context_total.data(), layout.hidden, batch);

  for (int layer = cfg.num_layers - 1; layer >= 0; --layer) {
    const LayerMaps maps = layer_maps(params.theta, layout, layer);
    const ForwardPass::Layer & cache = pass.layers[layer];
    const auto & blocks = layout.layers[layer];

    // Gather this layer's direct output gradients.
    MatrixXd d_head = MatrixXd::Zero(layout.out_dim, cols);
    Eigen::RowVectorXd d_scores(cols);
    for (int s = 0; s < batch; ++s) {
      const MixtureGrad & grad = output_grads[s][layer];
      for (int i = 0; i < n; ++i) {
        const int c = s * n + i;
        d_scores(c) = grad.score_logits[i];
        const auto & steps = grad.components[i].steps;
        for (int t = 0; t < horizon; ++t) {
          d_mu(2 * t, c) += steps[t].mu_x;
          d_mu(2 * t + 1, c) += steps[t].mu_y;
          d_head(5 * t + 2, c) = steps[t].log_sigma_x * cache.ls_pass(2 * t, c);
          d_head(5 * t + 3, c) = steps[t].log_sigma_y * cache.ls_pass(2 * t + 1, c);
          d_head(5 * t + 4, c) = steps[t].rho_raw;
        }
      }
    }
    for (int t = 0; t < horizon; ++t) {
      d_head.row(5 * t) = cfg.delta_scale * d_mu.row(2 * t);
      d_head.row(5 * t + 1) = cfg.delta_scale * d_mu.row(2 * t + 1);
    }

    // Score head.
    MatMap g_score_w1(grad_theta.data() + blocks.score_w1, layout.hidden, layout.input_dim);
    VecMap g_score_b1(grad_theta.data() + blocks.score_b1, layout.hidden);
    VecMap g_score_w2(grad_theta.data() + blocks.score_w2, layout.hidden);
    g_score_w2 += cache.hidden_score * d_scores.transpose();
    grad_theta[blocks.score_b2] += d_scores.sum();
    MatrixXd delta_score = (maps.score_w2 * d_scores).cwiseProduct(
      (1.0 - cache.hidden_score.array().square()).matrix());
    g_score_w1 += delta_score * cache.input.transpose();
    g_score_b1 += delta_score.rowwise().sum();
    MatrixXd d_input = maps.score_w1.transpose() * delta_score;

    // Refinement head.
    MatMap g_refine_w1(grad_theta.data() + blocks.refine_w1, layout.hidden, layout.input_dim);
    VecMap g_refine_b1(grad_theta.data() + blocks.refine_b1, layout.hidden);
    MatMap g_refine_w2(grad_theta.data() + blocks.refine_w2, layout.out_dim, layout.hidden);
    VecMap g_refine_b2(grad_theta.data() + blocks.refine_b2, layout.out_dim);
    g_refine_w2 += d_head * cache.hidden_refine.transpose();
    g_refine_b2 += d_head.rowwise().sum();
    MatrixXd delta_refine = (maps.refine_w2.transpose() * d_head).cwiseProduct(
      (1.0 - cache.hidden_refine.array().square()).matrix());
    g_refine_w1 += delta_refine * cache.input.transpose();
    g_refine_b1 += delta_refine.rowwise().sum();
    d_input += maps.refine_w1.transpose() * delta_refine;

    // Scatter input gradients: context feature, query, previous endpoint.
    for (int s = 0; s < batch; ++s) {
      for (int i = 0; i < n; ++i) {
        const int c = s * n + i;
        d_hidden_context.col(s) += d_input.col(c).head(layout.hidden);
        g_queries.col(i) += d_input.col(c).segment(layout.hidden, layout.hidden);
      }
    }
    if (layer > 0) {
      // Previous endpoint input came from the previous layer's last mean.
      d_mu.bottomRows(2) += d_input.bottomRows(2) / params.coord_scale;
    }
    // Residual mean update: d_mu flows unchanged into the previous layer.
  }

  // Encoder.
  MatrixXd delta_context = d_hidden_context.cwiseProduct(
    (1.0 - pass.hidden_context.array().square()).matrix());
  g_enc_w += delta_context * pass.context.transpose();
  g_enc_b += delta_context.rowwise().sum();

  return {grad_theta.data(), grad_theta.data() + grad_theta.size()};
}

std::vector<double> backward(
  const ModelParams & params, const Scene & scene,
  const std::vector<MixtureGrad> & output_grads)
{
  const ForwardPass pass = forward_pass(params, {&scene});
  return backward_from(params, pass, {output_grads});
}

AdamState make_adam_state(const ModelParams & params)
{
  AdamState state;
  state.m.assign(params.theta.size(), 0.0);
  state.v.assign(params.theta.size(), 0.0);
  return state;
}

void adam_step(
  ModelParams & params, const std::vector<double> & grads, AdamState & state, double lr)
{
  if (grads.size() != params.theta.size() || state.m.size() != params.theta.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw std::runtime_error("adam_step: non-finite gradient, training halted");
    }
  }
  state.step += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.theta.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params.theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace eda
