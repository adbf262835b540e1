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

#ifndef SPEEDLAB_RL_COLLECT_H_
#define SPEEDLAB_RL_COLLECT_H_

#include <vector>

#include "speedlab/diffusion/policy.h"
#include "speedlab/envs/rollout.h"
#include "speedlab/rl/ppo.h"

namespace speedlab {

struct CollectResult {
  std::vector<AugmentedTransition> transitions;
  std::vector<EpisodeRecord> episodes;
  long env_steps = 0;
  long failed_episodes = 0;
};

// Runs one batch of episodes with a recording sampler and expands every
// decision into finetune_steps augmented transitions. The sampler must
// return denoising chains of the behavior actor.
CollectResult Collect(PolicySampler& sampler, const Denoiser& actor,
                      const ValueNet& value, const Normalizer& normalizer,
                      const NoiseSchedule& schedule, const EnvConfig& env,
                      std::span<const State> starts, const DppoConfig& config,
                      RngStream& policy_rng);

// Expands recorded episodes; exposed for tests.
std::vector<AugmentedTransition> ExpandEpisodes(
    const std::vector<EpisodeRecord>& episodes, const Denoiser& actor,
    const ValueNet& value, const Normalizer& normalizer, const NoiseSchedule& schedule,
    const DppoConfig& config);

}  // namespace speedlab

#endif  // SPEEDLAB_RL_COLLECT_H_
