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

#ifndef SPEEDLAB_BASELINES_ACCEL_POLICY_H_
#define SPEEDLAB_BASELINES_ACCEL_POLICY_H_

#include <memory>

#include "speedlab/envs/policy.h"
#include "speedlab/rl/finetune.h"

namespace speedlab {

// Executes accel(chunk, v, exec_horizon) of every chunk the inner sampler
// returns. Recorded decisions keep the full pre-downsampling chunk, so RL
// updates see the original policy output.
class AccelPolicySampler : public PolicySampler {
 public:
  AccelPolicySampler(std::unique_ptr<PolicySampler> inner, double v, int exec_horizon);

  int chunk_length() const override { return exec_horizon_; }
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

 private:
  std::unique_ptr<PolicySampler> inner_;
  double v_;
  int exec_horizon_;
};

// Smallest chunk length that covers exec_horizon accelerated steps.
int RequiredHorizon(double v, int exec_horizon);

ActionChunk AccelerateChunk(const ActionChunk& chunk, double v, int exec_horizon);

SamplerFactory MakeAccelPolicyFactory(double v, int exec_horizon);

}  // namespace speedlab

#endif  // SPEEDLAB_BASELINES_ACCEL_POLICY_H_
