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

#include "speedlab/parl/distill.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

double StepwiseBcLoss(const Denoiser& net, const NoiseSchedule& schedule,
                      const std::vector<const DistillSample*>& batch, int finetune_steps,
                      double min_std, Vector* grad) {
  const int num_k = schedule.num_steps;
  if (finetune_steps < 1 || finetune_steps > num_k) {
    throw Error("distill: finetune_steps must be in [1, K]");
  }
  const int b = static_cast<int>(batch.size());
  if (b == 0) return 0.0;
  const int cols = b * finetune_steps;
  const int dim = net.config().chunk_dim();
  Matrix x(dim, cols), target(dim, cols), obs(net.config().obs_dim, cols);
  std::vector<int> steps(cols);
  int c = 0;
  for (const DistillSample* s : batch) {
    if (static_cast<int>(s->chain.size()) != num_k + 1) {
      throw Error("distill: chain length does not match the schedule");
    }
    for (int k = finetune_steps; k >= 1; --k, ++c) {
      x.col(c) = s->chain[num_k - k];
      target.col(c) = s->chain[num_k - k + 1];
      obs.col(c) = s->obs;
      steps[c] = k;
    }
  }
  Denoiser::Cache cache;
  const Matrix eps_hat = net.Forward(x, obs, steps, grad != nullptr ? &cache : nullptr);
  double loss = 0.0;
  Matrix d_out(dim, cols);
  for (int j = 0; j < cols; ++j) {
    const int k = steps[j];
    const double coef = PosteriorMeanEpsCoefficient(schedule, k);
    const Vector mean = x.col(j) / std::sqrt(schedule.alpha(k)) + coef * eps_hat.col(j);
    const double std = StepStd(schedule, k, min_std);
    loss -= GaussianLogDensity(target.col(j), mean, std);
    d_out.col(j) = (coef / (std * std * cols)) * (mean - target.col(j));
  }
  if (grad != nullptr) net.Backward(cache, d_out, *grad);
  return loss / cols;
}

double DistillStep(Denoiser& net, const NoiseSchedule& schedule,
                   const std::vector<const DistillSample*>& batch, int finetune_steps,
                   double min_std, nn::Adam& adam, double lr) {
  Vector grad = Vector::Zero(net.num_params());
  const double loss = StepwiseBcLoss(net, schedule, batch, finetune_steps, min_std, &grad);
  if (!std::isfinite(loss) || !grad.allFinite()) {
    throw DivergenceError("distill: non-finite loss");
  }
  adam.Step(net.params(), std::move(grad), lr);
  return loss;
}

}  // namespace speedlab
