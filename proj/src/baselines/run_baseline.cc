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

#include "speedlab/baselines/run_baseline.h"

#include "speedlab/baselines/accel_policy.h"
#include "speedlab/core/error.h"

namespace speedlab {

std::string ToString(BaselineName name) {
  switch (name) {
    case BaselineName::kNoAccel: return "no_accel";
    case BaselineName::kAccelDemo: return "accel_demo";
    case BaselineName::kAccelPolicy: return "accel_policy";
    case BaselineName::kSpeedTuning: return "speedtuning";
    case BaselineName::kSpeedAug: return "speedaug";
  }
  return "unknown";
}

BaselineName ParseBaselineName(const std::string& s) {
  if (s == "no_accel") return BaselineName::kNoAccel;
  if (s == "accel_demo") return BaselineName::kAccelDemo;
  if (s == "accel_policy") return BaselineName::kAccelPolicy;
  if (s == "speedtuning") return BaselineName::kSpeedTuning;
  if (s == "speedaug") return BaselineName::kSpeedAug;
  throw Error("unknown baseline name: " + s);
}

AugmentConfig PretrainAugment(BaselineName name, const BaselineSettings& settings) {
  AugmentConfig a = settings.augment;
  switch (name) {
    case BaselineName::kSpeedAug:
      a.mode = AugmentMode::kUniform;
      break;
    case BaselineName::kAccelDemo:
      a.mode = AugmentMode::kConstant;
      a.v = settings.accel_demo_v;
      break;
    default:
      a.mode = AugmentMode::kNone;
      break;
  }
  return a;
}

PolicyConfig PretrainPolicyConfig(BaselineName name, const BaselineSettings& settings) {
  PolicyConfig c = settings.policy;
  if (name == BaselineName::kAccelPolicy || name == BaselineName::kSpeedTuning) {
    c.horizon = settings.long_horizon;
  }
  return c;
}

std::vector<MetricRow> FinetuneBaseline(BaselineName name, const DiffusionPolicy& pretrained,
                                        const BaselineSettings& settings,
                                        const FinetuneOptions& options, std::uint64_t seed) {
  switch (name) {
    case BaselineName::kSpeedTuning:
      return SpeedTune(pretrained, settings.env, settings.speedtuning, options, seed).rows;
    case BaselineName::kAccelPolicy: {
      FinetuneOptions o = options;
      o.make_sampler = MakeAccelPolicyFactory(settings.accel_policy_v, settings.dppo.exec_horizon);
      return Finetune(pretrained, settings.env, settings.dppo, o, seed).rows;
    }
    default:
      return Finetune(pretrained, settings.env, settings.dppo, options, seed).rows;
  }
}

std::vector<MetricRow> RunBaseline(BaselineName name, const Dataset& dataset,
                                   const BaselineSettings& settings,
                                   const FinetuneOptions& options, std::uint64_t seed) {
  const PretrainResult pre = Pretrain(dataset, PretrainAugment(name, settings),
                                      PretrainPolicyConfig(name, settings), seed);
  return FinetuneBaseline(name, pre.policy, settings, options, seed);
}

}  // namespace speedlab
