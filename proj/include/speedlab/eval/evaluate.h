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

#ifndef SPEEDLAB_EVAL_EVALUATE_H_
#define SPEEDLAB_EVAL_EVALUATE_H_

#include <cstdint>
#include <optional>
#include <span>

#include "speedlab/envs/rollout.h"

namespace speedlab {

// Evaluation episodes draw resets and policy noise from this seed unless a
// caller overrides it, so every method is scored on the same initial states.
inline constexpr std::uint64_t kDefaultEvalSeed = 0x5eedE7A1ull;

struct EvalReport {
  int n_episodes = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_exec_time;  // absent without successes
  std::optional<double> exec_time_std;
  long env_steps_so_far = 0;
  long failed_episodes_so_far = 0;
};

EvalReport Summarize(std::span<const EpisodeRecord> episodes);

struct EvalOptions {
  int n_episodes = 400;
  int exec_horizon = 8;
  std::uint64_t eval_seed = kDefaultEvalSeed;
};

EvalReport Evaluate(PolicySampler& policy, const EnvConfig& config,
                    const EvalOptions& options);

// Per-episode lengths of the successful episodes, for variance comparisons.
std::vector<double> SuccessfulLengths(std::span<const EpisodeRecord> episodes);

}  // namespace speedlab

#endif  // SPEEDLAB_EVAL_EVALUATE_H_
