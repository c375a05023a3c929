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

#ifndef EDA__LOSS_HPP_
#define EDA__LOSS_HPP_

#include <utility>
#include <vector>

#include "eda/types.hpp"

namespace eda
{

enum class ClsKind { kBce, kCe };

struct LossConfig
{
  double lambda_reg = 1.0;
  double lambda_cls = 1.0;
  ClsKind cls_kind = ClsKind::kBce;
  std::vector<double> per_layer_weights;  // empty = all ones
  double rho_bound = 0.5;
};

struct LayerLoss
{
  double reg = 0.0;
  double cls = 0.0;
};

struct LossBreakdown
{
  double total = 0.0;
  double reg = 0.0;
  double cls = 0.0;
  std::vector<LayerLoss> per_layer;
};

/// Gradients w.r.t. one layer's raw outputs. components[i] has the same
/// shape as the corresponding MixtureOutput component; every field holds
/// the partial derivative of the loss w.r.t. that output scalar.
struct MixtureGrad
{
  std::vector<GaussianTrajectory> components;
  std::vector<double> score_logits;
};

MixtureGrad zero_grad_like(const MixtureOutput & output);

/// Negative log-likelihood of the ground truth under the component's
/// per-step bivariate Gaussians, averaged over the horizon. The
/// correlation is rho_bound * tanh(rho_raw); sigma = exp(log_sigma).
/// grad holds exact partials w.r.t. mu, log_sigma and rho_raw.
std::pair<double, GaussianTrajectory> gaussian_nll(
  const GaussianTrajectory & component, const Trajectory & gt, double rho_bound = 0.5);

/// Binary cross entropy on sigmoid(logits), averaged over the distinct
/// subset; positive target 1, other distinct targets 0, masked-out
/// logits contribute nothing and get exactly-zero gradients.
std::pair<double, std::vector<double>> bce_scores(
  const std::vector<double> & logits, int positive_index,
  const std::vector<bool> & distinct_mask);

/// Softmax cross entropy over all logits (the static-anchor baseline).
std::pair<double, std::vector<double>> ce_scores(
  const std::vector<double> & logits, int positive_index);

/// Deep-supervised mixture loss: per layer, Gaussian NLL on the positive
/// component only (winner-takes-all) plus the classification term, each
/// weighted by per-layer weight and the lambda factors.
std::pair<LossBreakdown, std::vector<MixtureGrad>> mixture_loss(
  const std::vector<MixtureOutput> & per_layer_outputs,
  const std::vector<MatchResult> & per_layer_matches,
  const Trajectory & gt, const LossConfig & config);

}  // namespace eda

#endif  // EDA__LOSS_HPP_
