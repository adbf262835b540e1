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

#include "speedlab/diffusion/pretrain.h"

#include <cmath>

#include "speedlab/core/error.h"
#include "speedlab/nn/adam.h"

namespace speedlab {

Vector AugmentedTarget(const Matrix& normalized_actions, int t, double v, int horizon,
                       Interp interp) {
  const Matrix chunk = Accel(normalized_actions, t, v, horizon, interp);
  return Eigen::Map<const Vector>(chunk.data(), chunk.size());
}

double DenoisingLoss(const Denoiser& net, const NoiseSchedule& schedule,
                     const Matrix& chunks, const Matrix& obs, std::span<const int> steps,
                     const Matrix& eps, Vector* grad) {
  Matrix noisy(chunks.rows(), chunks.cols());
  for (int j = 0; j < chunks.cols(); ++j) {
    const double ab = schedule.alpha_bar(steps[j]);
    noisy.col(j) = std::sqrt(ab) * chunks.col(j) + std::sqrt(1.0 - ab) * eps.col(j);
  }
  Denoiser::Cache cache;
  const Matrix pred = net.Forward(noisy, obs, steps, grad != nullptr ? &cache : nullptr);
  const Matrix diff = pred - eps;
  const double n = static_cast<double>(diff.size());
  if (grad != nullptr) net.Backward(cache, (2.0 / n) * diff, *grad);
  return diff.squaredNorm() / n;
}

PretrainResult Pretrain(const Dataset& dataset, const AugmentConfig& augment,
                        const PolicyConfig& config, std::uint64_t seed,
                        const PretrainLogFn& log) {
  dataset.Validate();
  augment.Validate();
  config.Validate();
  PretrainResult result{
      DiffusionPolicy(config, Normalizer::FromDataset(dataset), dataset.obs_dim(),
                      dataset.action_dim()),
      {}};
  DiffusionPolicy& policy = result.policy;
  RngStream init_rng(seed, Stream::kInit);
  policy.net().Init(init_rng);

  const Normalizer& norm = policy.normalizer();
  std::vector<Matrix> obs, actions;
  std::vector<std::pair<int, int>> index;
  for (size_t d = 0; d < dataset.demos.size(); ++d) {
    const Demonstration& demo = dataset.demos[d];
    obs.push_back(norm.NormalizeObs(demo.states.cast<double>()));
    actions.push_back(norm.NormalizeActions(demo.actions.cast<double>()));
    for (int t = 0; t < demo.length(); ++t) index.emplace_back(static_cast<int>(d), t);
  }

  RngStream batch_rng(seed, Stream::kMinibatch);
  RngStream aug_rng(seed, Stream::kAugment);
  RngStream noise_rng(seed, Stream::kDiffusionNoise);
  nn::AdamOptions opts;
  opts.weight_decay = config.weight_decay;
  nn::Adam adam(policy.net().num_params(), opts);
  Vector ema = policy.net().params();

  const int batch = config.batch_size;
  const int dim = policy.net().config().chunk_dim();
  const int horizon = config.horizon;
  const int last = static_cast<int>(index.size()) - 1;
  const int num_steps = policy.schedule().num_steps;
  Matrix chunks(dim, batch), cond(dataset.obs_dim(), batch), eps(dim, batch);
  std::vector<int> steps(batch);
  Vector grad(policy.net().num_params());
  for (int it = 0; it < config.train_steps; ++it) {
    for (int b = 0; b < batch; ++b) {
      const auto [d, t] = index[batch_rng.UniformInt(0, last)];
      const double v = SampleFactor(augment, aug_rng);
      chunks.col(b) = AugmentedTarget(actions[d], t, v, horizon, augment.interp);
      cond.col(b) = obs[d].col(t);
      steps[b] = batch_rng.UniformInt(1, num_steps);
    }
    for (int j = 0; j < batch; ++j) {
      for (int i = 0; i < dim; ++i) eps(i, j) = noise_rng.Normal();
    }
    grad.setZero();
    const double loss =
        DenoisingLoss(policy.net(), policy.schedule(), chunks, cond, steps, eps, &grad);
    if (!std::isfinite(loss) || !grad.allFinite()) {
      throw DivergenceError("pretrain: non-finite loss at step " + std::to_string(it));
    }
    const double lr = nn::CosineLr(config.lr_start, config.lr_end, it, config.train_steps);
    adam.Step(policy.net().params(), grad, lr);
    if (config.ema_decay > 0.0) {
      ema = config.ema_decay * ema + (1.0 - config.ema_decay) * policy.net().params();
    }
    result.loss_trace.push_back(loss);
    if (log && config.log_every > 0 &&
        (it % config.log_every == 0 || it + 1 == config.train_steps)) {
      log(it, loss, lr);
    }
  }
  if (config.ema_decay > 0.0) policy.net().params() = ema;
  return result;
}

}  // namespace speedlab
