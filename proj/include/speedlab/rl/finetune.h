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

#ifndef SPEEDLAB_RL_FINETUNE_H_
#define SPEEDLAB_RL_FINETUNE_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "speedlab/diffusion/policy.h"
#include "speedlab/eval/goal.h"
#include "speedlab/eval/metric_log.h"
#include "speedlab/rl/collect.h"

namespace speedlab {

// Pre-trained network for the frozen denoising prefix plus the fine-tuned
// actor used for the last finetune_steps levels.
struct FinetunedPolicy {
  DiffusionPolicy base;
  Denoiser actor;
  int finetune_steps = 0;

  static FinetunedPolicy FromPretrained(const DiffusionPolicy& base, int finetune_steps);
  void Save(const std::filesystem::path& dir) const;
  static FinetunedPolicy Load(const std::filesystem::path& dir);
};

using SamplerFactory = std::function<std::unique_ptr<PolicySampler>(
    const DiffusionPolicy& base, const Denoiser* actor, int finetune_steps,
    double min_std)>;

std::unique_ptr<PolicySampler> MakeDiffusionSampler(const DiffusionPolicy& base,
                                                    const Denoiser* actor,
                                                    int finetune_steps, double min_std);

struct FinetuneOptions {
  long budget_env_steps = 200000;
  int eval_every = 1;          // iterations between evaluations
  EvalOptions eval;
  double eval_min_std = 0.0;   // evaluation samples with the plain reverse process
  std::optional<Goal> stop_goal;
  std::optional<double> baseline_exec_time;
  std::filesystem::path checkpoint_dir;  // empty disables checkpointing
  MetricLogWriter* log = nullptr;
  SamplerFactory make_sampler = MakeDiffusionSampler;
  std::function<void(const MetricRow&)> on_row;
};

struct FinetuneResult {
  std::vector<MetricRow> rows;
  FinetunedPolicy policy;
};

FinetuneResult Finetune(const DiffusionPolicy& pretrained, const EnvConfig& env,
                        const DppoConfig& config, const FinetuneOptions& options,
                        std::uint64_t seed);

}  // namespace speedlab

#endif  // SPEEDLAB_RL_FINETUNE_H_
