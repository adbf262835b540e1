// Copyright 2026 The speedlab Authors
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

#include "speedlab/rl/ppo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speedlab/core/error.h"

namespace speedlab {

ValueNet::ValueNet(int obs_dim, const std::vector<int>& widths, RngStream& rng) {
  std::vector<int> sizes = {obs_dim};
  sizes.insert(sizes.end(), widths.begin(), widths.end());
  sizes.push_back(1);
  net_ = nn::MlpNet(sizes, rng);
}

Vector ValueNet::Predict(const Matrix& obs) const {
  return net_.Forward(obs).row(0).transpose();
}

double ValueNet::Fit(const Matrix& obs, const Vector& targets, nn::Adam& adam,
                     double lr) {
  nn::Mlp::Cache cache;
  const Matrix pred = net_.Forward(obs, &cache);
  const Matrix diff = pred - targets.transpose();
  const double n = static_cast<double>(targets.size());
  Vector grad = Vector::Zero(net_.params.size());
  net_.arch.Backward(net_.params, cache, diff / n, grad);
  if (!grad.allFinite()) throw DivergenceError("value: non-finite gradient");
  adam.Step(net_.params, std::move(grad), lr);
  return 0.5 * diff.squaredNorm() / n;
}

double ClippedSurrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

bool SurrogateGradientActive(double ratio, double advantage, double eps) {
  if (advantage > 0.0) return ratio < 1.0 + eps;
  if (advantage < 0.0) return ratio > 1.0 - eps;
  return true;
}

namespace {

struct StepTerms {
  Matrix mean;     // reverse-step means, chunk_dim x B
  Vector std;      // per column
  Vector coef;     // d mean / d eps_hat per column
  Vector log_prob;  // reduced
};

StepTerms ReverseStep(const Denoiser& net, const NoiseSchedule& schedule,
                      const std::vector<const AugmentedTransition*>& batch,
                      const DppoConfig& config, Denoiser::Cache* cache) {
  const int b = static_cast<int>(batch.size());
  const int dim = net.config().chunk_dim();
  Matrix a_k(dim, b), obs(net.config().obs_dim, b);
  std::vector<int> steps(b);
  for (int j = 0; j < b; ++j) {
    a_k.col(j) = batch[j]->a_k;
    obs.col(j) = batch[j]->obs;
    steps[j] = batch[j]->k;
  }
  const Matrix eps_hat = net.Forward(a_k, obs, steps, cache);
  StepTerms t;
  t.mean.resize(dim, b);
  t.std.resize(b);
  t.coef.resize(b);
  t.log_prob.resize(b);
  const double scale = config.log_prob_reduction == LogProbReduction::kMean ? 1.0 / dim : 1.0;
  for (int j = 0; j < b; ++j) {
    const int k = steps[j];
    t.coef[j] = PosteriorMeanEpsCoefficient(schedule, k);
    t.mean.col(j) = a_k.col(j) / std::sqrt(schedule.alpha(k)) + t.coef[j] * eps_hat.col(j);
    t.std[j] = StepStd(schedule, k, config.min_std);
    t.log_prob[j] = scale * GaussianLogDensity(batch[j]->a_km1, t.mean.col(j), t.std[j]);
  }
  return t;
}

}  // namespace

Vector TransitionLogProbs(const Denoiser& net, const NoiseSchedule& schedule,
                          const std::vector<const AugmentedTransition*>& batch,
                          const DppoConfig& config) {
  if (batch.empty()) return {};
  return ReverseStep(net, schedule, batch, config, nullptr).log_prob;
}

PpoState MakePpoState(const Denoiser& actor, const ValueNet& value,
                      const DppoConfig& config) {
  nn::AdamOptions actor_opts;
  actor_opts.max_grad_norm = config.max_grad_norm;
  nn::AdamOptions critic_opts;
  critic_opts.max_grad_norm = config.max_grad_norm;
  return {nn::Adam(actor.num_params(), actor_opts),
          nn::Adam(static_cast<int>(value.net().params.size()), critic_opts)};
}

PpoStats PpoUpdate(Denoiser& actor, ValueNet& value, PpoState& state,
                   const NoiseSchedule& schedule,
                   const std::vector<AugmentedTransition>& batch, const DppoConfig& config,
                   RngStream& rng) {
  PpoStats stats;
  if (batch.empty()) return stats;
  const int n = static_cast<int>(batch.size());
  const int dim = actor.config().chunk_dim();
  const double scale = config.log_prob_reduction == LogProbReduction::kMean ? 1.0 / dim : 1.0;

  // Chain heads carry the decision-level value targets.
  std::vector<int> heads;
  for (int i = 0; i < n; ++i) {
    if (i == 0 || batch[i].episode != batch[i - 1].episode ||
        batch[i].decision != batch[i - 1].decision) {
      heads.push_back(i);
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs_per_iter; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    double kl_sum = 0.0, loss_sum = 0.0, clipped = 0.0;
    for (int start = 0; start < n; start += config.minibatch_size) {
      const int stop = std::min(n, start + config.minibatch_size);
      std::vector<const AugmentedTransition*> mb;
      for (int i = start; i < stop; ++i) mb.push_back(&batch[order[i]]);
      const int b = static_cast<int>(mb.size());
      Denoiser::Cache cache;
      const StepTerms t = ReverseStep(actor, schedule, mb, config, &cache);
      Matrix d_out(dim, b);
      for (int j = 0; j < b; ++j) {
        const double log_ratio = t.log_prob[j] - mb[j]->log_prob_old;
        const double ratio = std::exp(log_ratio);
        if (!std::isfinite(ratio)) throw DivergenceError("ppo: non-finite probability ratio");
        const double eps = config.ClipEps(mb[j]->k);
        const double adv = mb[j]->advantage;
        loss_sum -= ClippedSurrogate(ratio, adv, eps);
        kl_sum += (ratio - 1.0) - log_ratio;
        if (std::abs(ratio - 1.0) > eps) clipped += 1.0;
        double g = 0.0;  // d loss / d log_prob
        if (SurrogateGradientActive(ratio, adv, eps)) g = -ratio * adv / b;
        const double s2 = t.std[j] * t.std[j];
        d_out.col(j) = (g * scale * t.coef[j] / s2) * (mb[j]->a_km1 - t.mean.col(j));
      }
      Vector grad = Vector::Zero(actor.num_params());
      actor.Backward(cache, d_out, grad);
      if (!grad.allFinite()) throw DivergenceError("ppo: non-finite actor gradient");
      state.actor_adam.Step(actor.params(), std::move(grad), config.actor_lr);
    }

    std::vector<int> head_order = heads;
    std::shuffle(head_order.begin(), head_order.end(), rng.engine());
    double value_loss = 0.0;
    int value_batches = 0;
    for (size_t start = 0; start < head_order.size();
         start += static_cast<size_t>(config.minibatch_size)) {
      const size_t stop = std::min(head_order.size(), start + config.minibatch_size);
      Matrix obs(batch[0].obs.size(), static_cast<int>(stop - start));
      Vector targets(static_cast<int>(stop - start));
      for (size_t i = start; i < stop; ++i) {
        obs.col(i - start) = batch[head_order[i]].obs;
        targets[i - start] = batch[head_order[i]].return_target;
      }
      value_loss += value.Fit(obs, targets, state.critic_adam, config.critic_lr);
      ++value_batches;
    }

    stats.epochs_run = epoch + 1;
    stats.policy_loss = loss_sum / n;
    stats.approx_kl = kl_sum / n;
    stats.clip_fraction = clipped / n;
    stats.value_loss = value_batches > 0 ? value_loss / value_batches : 0.0;
    if (stats.approx_kl > config.target_kl) {
      stats.early_stopped = true;
      break;
    }
  }
  return stats;
}

}  // namespace speedlab
