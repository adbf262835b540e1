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

#include "speedlab/baselines/accel_policy.h"

#include <cmath>

#include "speedlab/augment/accel.h"
#include "speedlab/core/error.h"

namespace speedlab {

int RequiredHorizon(double v, int exec_horizon) {
  return static_cast<int>(std::ceil(exec_horizon * v - 1e-9));
}

ActionChunk AccelerateChunk(const ActionChunk& chunk, double v, int exec_horizon) {
  if (chunk.horizon() < RequiredHorizon(v, exec_horizon)) {
    throw Error("accel_policy: horizon too short for requested v");
  }
  return ActionChunk(Accel(chunk.actions, 0, v, exec_horizon));
}

AccelPolicySampler::AccelPolicySampler(std::unique_ptr<PolicySampler> inner, double v,
                                       int exec_horizon)
    : inner_(std::move(inner)), v_(v), exec_horizon_(exec_horizon) {
  if (v < 1.0) throw Error("accel_policy: v must be >= 1");
  if (inner_->chunk_length() < RequiredHorizon(v, exec_horizon)) {
    throw Error("accel_policy: horizon too short for requested v");
  }
}

PolicyOutput AccelPolicySampler::Sample(std::span<const PolicyQuery> queries,
                                        RngStream& rng, bool record) {
  PolicyOutput out = inner_->Sample(queries, rng, record);
  for (ActionChunk& chunk : out.execute) chunk = AccelerateChunk(chunk, v_, exec_horizon_);
  return out;
}

SamplerFactory MakeAccelPolicyFactory(double v, int exec_horizon) {
  return [v, exec_horizon](const DiffusionPolicy& base, const Denoiser* actor,
                           int finetune_steps, double min_std) {
    return std::make_unique<AccelPolicySampler>(
        MakeDiffusionSampler(base, actor, finetune_steps, min_std), v, exec_horizon);
  };
}

}  // namespace speedlab
