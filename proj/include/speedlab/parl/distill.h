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

#ifndef SPEEDLAB_PARL_DISTILL_H_
#define SPEEDLAB_PARL_DISTILL_H_

#include <vector>

#include "speedlab/diffusion/denoiser.h"
#include "speedlab/diffusion/schedule.h"
#include "speedlab/nn/adam.h"

namespace speedlab {

struct DistillSample {
  Vector obs;                 // normalized
  std::vector<Vector> chain;  // a^(K) .. a^(0)
};

// Mean over samples and levels k = 1..finetune_steps of
// -log N(a^(k-1) | mu_theta(s, a^(k), k), sigma_k^2 I), with
// sigma_k = max(sqrt(beta_tilde_k), min_std). Accumulates the gradient into
// grad when given.
double StepwiseBcLoss(const Denoiser& net, const NoiseSchedule& schedule,
                      const std::vector<const DistillSample*>& batch, int finetune_steps,
                      double min_std, Vector* grad);

double DistillStep(Denoiser& net, const NoiseSchedule& schedule,
                   const std::vector<const DistillSample*>& batch, int finetune_steps,
                   double min_std, nn::Adam& adam, double lr);

}  // namespace speedlab

#endif  // SPEEDLAB_PARL_DISTILL_H_
