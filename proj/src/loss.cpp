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

#include "eda/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eda
{
namespace
{

constexpr double kLog2Pi = 1.8378770664093453;

double sigmoid(double x)
{
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x)
{
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

MixtureGrad zero_grad_like(const MixtureOutput & output)
{
  MixtureGrad grad;
  grad.components.resize(output.components.size());
  for (std::size_t i = 0; i < output.components.size(); ++i) {
    grad.components[i].steps.assign(output.components[i].steps.size(), GaussStep{});
  }
  grad.score_logits.assign(output.score_logits.size(), 0.0);
  return grad;
}

std::pair<double, GaussianTrajectory> gaussian_nll(
  const GaussianTrajectory & component, const Trajectory & gt, double rho_bound)
{
  const int horizon = component.horizon();
  if (horizon != gt.horizon()) {
    throw std::invalid_argument("gaussian_nll: horizon mismatch");
  }
  const double inv_t = 1.0 / static_cast<double>(horizon);

  double loss = 0.0;
  GaussianTrajectory grad;
  grad.steps.assign(horizon, GaussStep{});

  for (int t = 0; t < horizon; ++t) {
    const GaussStep & s = component.steps[t];
    const double sigma_x = std::exp(s.log_sigma_x);
    const double sigma_y = std::exp(s.log_sigma_y);
    const double tanh_r = std::tanh(s.rho_raw);
    const double rho = rho_bound * tanh_r;
    const double one_minus_r2 = 1.0 - rho * rho;

    const double dx = gt.points[t].x - s.mu_x;
    const double dy = gt.points[t].y - s.mu_y;
    const double a = dx / sigma_x;
    const double b = dy / sigma_y;
    const double quad = (a * a - 2.0 * rho * a * b + b * b) / one_minus_r2;

    loss += kLog2Pi + s.log_sigma_x + s.log_sigma_y + 0.5 * std::log(one_minus_r2) + 0.5 * quad;

    GaussStep & g = grad.steps[t];
    // d/d mu: dx = gt - mu, so d(dx)/d(mu_x) = -1.
    g.mu_x = -(a - rho * b) / (sigma_x * one_minus_r2) * inv_t;
    g.mu_y = -(b - rho * a) / (sigma_y * one_minus_r2) * inv_t;
    // d/d log_sigma: a scales as exp(-log_sigma_x).
    g.log_sigma_x = (1.0 + (rho * a * b - a * a) / one_minus_r2) * inv_t;
    g.log_sigma_y = (1.0 + (rho * a * b - b * b) / one_minus_r2) * inv_t;
    // d/d rho, then chain through rho = rho_bound * tanh(rho_raw).
    const double d_rho =
      -rho / one_minus_r2 +
      (rho * (a * a - 2.0 * rho * a * b + b * b) - a * b * one_minus_r2) /
        (one_minus_r2 * one_minus_r2);
    g.rho_raw = d_rho * rho_bound * (1.0 - tanh_r * tanh_r) * inv_t;
  }
  return {loss * inv_t, std::move(grad)};
}

std::pair<double, std::vector<double>> bce_scores(
  const std::vector<double> & logits, int positive_index,
  const std::vector<bool> & distinct_mask)
{
  const int n = static_cast<int>(logits.size());
  if (static_cast<int>(distinct_mask.size()) != n) {
    throw std::invalid_argument("bce_scores: mask length mismatch");
  }
  if (positive_index < 0 || positive_index >= n || !distinct_mask[positive_index]) {
    throw std::invalid_argument("bce_scores: positive index not in the distinct set");
  }
  int selected = 0;
  for (bool m : distinct_mask) {
    selected += m ? 1 : 0;
  }
  const double inv_n = 1.0 / static_cast<double>(selected);

  double loss = 0.0;
  std::vector<double> grad(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!distinct_mask[i]) {
      continue;
    }
    const double target = (i == positive_index) ? 1.0 : 0.0;
    loss += softplus(logits[i]) - target * logits[i];
    grad[i] = (sigmoid(logits[i]) - target) * inv_n;
  }
  return {loss * inv_n, std::move(grad)};
}

std::pair<double, std::vector<double>> ce_scores(
  const std::vector<double> & logits, int positive_index)
{
  const int n = static_cast<int>(logits.size());
  if (positive_index < 0 || positive_index >= n) {
    throw std::invalid_argument("ce_scores: positive index out of range");
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum_exp = 0.0;
  for (double l : logits) {
    sum_exp += std::exp(l - max_logit);
  }
  const double log_sum = max_logit + std::log(sum_exp);

  std::vector<double> grad(n);
  for (int i = 0; i < n; ++i) {
    grad[i] = std::exp(logits[i] - log_sum) - (i == positive_index ? 1.0 : 0.0);
  }
  return {log_sum - logits[positive_index], std::move(grad)};
}

std::pair<LossBreakdown, std::vector<MixtureGrad>> mixture_loss(
  const std::vector<MixtureOutput> & per_layer_outputs,
  const std::vector<MatchResult> & per_layer_matches,
  const Trajectory & gt, const LossConfig & config)
{
  const int num_layers = static_cast<int>(per_layer_outputs.size());
  if (static_cast<int>(per_layer_matches.size()) != num_layers) {
    throw std::invalid_argument("mixture_loss: outputs/matches length mismatch");
  }
  std::vector<double> weights = config.per_layer_weights;
  if (weights.empty()) {
    weights.assign(num_layers, 1.0);
  }
  if (static_cast<int>(weights.size()) != num_layers) {
    throw std::invalid_argument("mixture_loss: per_layer_weights length mismatch");
  }

  LossBreakdown breakdown;
  breakdown.per_layer.resize(num_layers);
  std::vector<MixtureGrad> grads;
  grads.reserve(num_layers);

  for (int l = 0; l < num_layers; ++l) {
    const MixtureOutput & output = per_layer_outputs[l];
    const MatchResult & match = per_layer_matches[l];
    const double w = weights[l];
    MixtureGrad grad = zero_grad_like(output);

    // Winner-takes-all regression: positive component only.
    auto [reg, reg_grad] =
      gaussian_nll(output.components[match.positive_index], gt, config.rho_bound);
    const double reg_scale = w * config.lambda_reg;
    GaussianTrajectory & positive = grad.components[match.positive_index];
    for (int t = 0; t < reg_grad.horizon(); ++t) {
      positive.steps[t].mu_x = reg_scale * reg_grad.steps[t].mu_x;
      positive.steps[t].mu_y = reg_scale * reg_grad.steps[t].mu_y;
      positive.steps[t].log_sigma_x = reg_scale * reg_grad.steps[t].log_sigma_x;
      positive.steps[t].log_sigma_y = reg_scale * reg_grad.steps[t].log_sigma_y;
      positive.steps[t].rho_raw = reg_scale * reg_grad.steps[t].rho_raw;
    }

    // Classification: BCE respects the distinct mask, CE ignores it.
    double cls = 0.0;
    std::vector<double> cls_grad;
    if (config.cls_kind == ClsKind::kBce) {
      std::tie(cls, cls_grad) =
        bce_scores(output.score_logits, match.positive_index, match.distinct_mask);
    } else {
      std::tie(cls, cls_grad) = ce_scores(output.score_logits, match.positive_index);
    }
    const double cls_scale = w * config.lambda_cls;
    for (int i = 0; i < output.num_components(); ++i) {
      grad.score_logits[i] = cls_scale * cls_grad[i];
    }

    breakdown.per_layer[l] = {reg, cls};
    breakdown.reg += w * config.lambda_reg * reg;
    breakdown.cls += w * config.lambda_cls * cls;
    breakdown.total += w * (config.lambda_reg * reg + config.lambda_cls * cls);
    grads.push_back(std::move(grad));
  }
  return {std::move(breakdown), std::move(grads)};
}

}  // namespace eda
