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

#ifndef SPEEDLAB_RL_TRANSITION_H_
#define SPEEDLAB_RL_TRANSITION_H_

#include <string>
#include <vector>

#include "speedlab/core/types.h"

namespace speedlab {

enum class LogProbReduction { kMean, kSum };

struct DppoConfig {
  double gamma = 0.99;          // environment discount
  double gamma_denoise = 0.99;  // discount between denoising levels
  double gae_lambda = 0.95;
  double clip_eps_high_k = 0.001;  // at k = finetune_steps
  double clip_eps_low_k = 0.01;    // at k = 1
  int finetune_steps = 10;
  double min_std = 0.05;
  double actor_lr = 1e-5;
  double critic_lr = 1e-3;
  int epochs_per_iter = 10;
  int minibatch_size = 2000;
  int episodes_per_iter = 50;
  std::vector<int> value_widths = {256, 256, 256};
  double target_kl = 1.0;     // early stop threshold on the approximate KL
  double max_grad_norm = 1.0;
  bool normalize_advantages = true;
  LogProbReduction log_prob_reduction = LogProbReduction::kMean;
  int exec_horizon = 8;

  void Validate(int num_denoising_steps) const;
  // PPO clip radius for a transition whose network input level is k.
  double ClipEps(int k) const;
};

// One denoising step a^(k) -> a^(k-1) of one environment decision, viewed as
// a transition of the denoising-augmented MDP. `k` is the network input
// level; the chunk produced on the k = 1 transition is the executed a^(0), so
// the environment reward sits on that transition and nowhere else.
struct AugmentedTransition {
  int episode = 0;
  int decision = 0;
  int k = 0;
  Vector obs;    // normalized observation s_t
  Vector a_k;    // normalized, flattened
  Vector a_km1;
  double env_reward = 0.0;
  double log_prob_old = 0.0;

  // Filled by the collector from the value net.
  double value = 0.0;            // V(s_t), shared by the whole chain
  double bootstrap_value = 0.0;  // V(s_next) for a truncated episode end
  double discount = 0.0;         // discount linking to the successor transition
  bool episode_end = false;      // no successor in the batch
  bool terminal = false;         // episode ended in an absorbing success

  double advantage = 0.0;
  double return_target = 0.0;

  int output_level() const { return k - 1; }
};

}  // namespace speedlab

#endif  // SPEEDLAB_RL_TRANSITION_H_
