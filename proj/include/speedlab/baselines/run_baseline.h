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

#ifndef SPEEDLAB_BASELINES_RUN_BASELINE_H_
#define SPEEDLAB_BASELINES_RUN_BASELINE_H_

#include <string>
#include <vector>

#include "speedlab/baselines/speedtuning.h"
#include "speedlab/diffusion/pretrain.h"

namespace speedlab {

enum class BaselineName { kNoAccel, kAccelDemo, kAccelPolicy, kSpeedTuning, kSpeedAug };

std::string ToString(BaselineName name);
BaselineName ParseBaselineName(const std::string& s);

struct BaselineSettings {
  EnvConfig env;
  PolicyConfig policy;
  AugmentConfig augment;  // used by speedaug (uniform) and accel_demo (constant)
  DppoConfig dppo;
  SpeedTuningConfig speedtuning;
  double accel_demo_v = 3.0;
  double accel_policy_v = 2.0;
  int long_horizon = 32;  // accel_policy and speedtuning base policies
};

// Pre-training recipe of a baseline.
AugmentConfig PretrainAugment(BaselineName name, const BaselineSettings& settings);
PolicyConfig PretrainPolicyConfig(BaselineName name, const BaselineSettings& settings);

// Fine-tunes a pre-trained policy with the baseline's RL procedure and
// returns rows in the shared metric-log schema.
std::vector<MetricRow> FinetuneBaseline(BaselineName name, const DiffusionPolicy& pretrained,
                                        const BaselineSettings& settings,
                                        const FinetuneOptions& options, std::uint64_t seed);

// Pre-train then fine-tune.
std::vector<MetricRow> RunBaseline(BaselineName name, const Dataset& dataset,
                                   const BaselineSettings& settings,
                                   const FinetuneOptions& options, std::uint64_t seed);

}  // namespace speedlab

#endif  // SPEEDLAB_BASELINES_RUN_BASELINE_H_
