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

#include "speedlab/rl/transition.h"

#include "speedlab/core/error.h"

namespace speedlab {

void DppoConfig::Validate(int num_denoising_steps) const {
  if (finetune_steps < 1 || finetune_steps > num_denoising_steps) {
    throw Error("dppo: finetune_steps must be in [1, K]");
  }
  if (!(clip_eps_high_k > 0.0) || !(clip_eps_low_k > 0.0)) {
    throw Error("dppo: clip values must be positive");
  }
  if (gamma <= 0.0 || gamma > 1.0 || gamma_denoise <= 0.0 || gamma_denoise > 1.0) {
    throw Error("dppo: discounts must be in (0, 1]");
  }
  if (gae_lambda < 0.0 || gae_lambda > 1.0) throw Error("dppo: gae_lambda must be in [0, 1]");
  if (epochs_per_iter < 1 || epochs_per_iter > 10) {
    throw Error("dppo: epochs_per_iter must be in [1, 10]");
  }
  if (minibatch_size < 1 || episodes_per_iter < 1) {
    throw Error("dppo: minibatch_size and episodes_per_iter must be >= 1");
  }
  if (min_std < 0.0) throw Error("dppo: min_std must be >= 0");
  if (exec_horizon < 1) throw Error("dppo: exec_horizon must be >= 1");
}

double DppoConfig::ClipEps(int k) const {
  if (finetune_steps == 1) return clip_eps_low_k;
  const double w = static_cast<double>(k - 1) / (finetune_steps - 1);
  return clip_eps_low_k + w * (clip_eps_high_k - clip_eps_low_k);
}

}  // namespace speedlab
