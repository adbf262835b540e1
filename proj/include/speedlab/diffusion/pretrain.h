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

#ifndef SPEEDLAB_DIFFUSION_PRETRAIN_H_
#define SPEEDLAB_DIFFUSION_PRETRAIN_H_

#include <functional>
#include <vector>

#include "speedlab/augment/accel.h"
#include "speedlab/core/rng.h"
#include "speedlab/diffusion/policy.h"

namespace speedlab {

struct PretrainResult {
  DiffusionPolicy policy;
  std::vector<double> loss_trace;  // per-step minibatch loss
};

using PretrainLogFn = std::function<void(int step, double loss, double lr)>;

// Minimizes E || eps - eps_theta(sqrt(abar_k) Accel(a, v) + sqrt(1 - abar_k) eps,
// s, k) ||^2 with (s, a) a random (state, action subsequence) pair of the
// dataset, k ~ U{1..K} and v drawn from the augmentation config for every
// sample. Throws DivergenceError on a non-finite loss.
PretrainResult Pretrain(const Dataset& dataset, const AugmentConfig& augment,
                        const PolicyConfig& config, std::uint64_t seed,
                        const PretrainLogFn& log = nullptr);

// The minibatch loss and its gradient for explicit (chunk, obs, k, eps)
// tuples. Exposed for gradient checks.
double DenoisingLoss(const Denoiser& net, const NoiseSchedule& schedule,
                     const Matrix& chunks, const Matrix& obs, std::span<const int> steps,
                     const Matrix& eps, Vector* grad);

// Speed-augmented training target for one (demo, t): normalized chunk,
// flattened.
Vector AugmentedTarget(const Matrix& normalized_actions, int t, double v, int horizon,
                       Interp interp);

}  // namespace speedlab

#endif  // SPEEDLAB_DIFFUSION_PRETRAIN_H_
