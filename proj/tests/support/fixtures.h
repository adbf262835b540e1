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

#ifndef SPEEDLAB_TESTS_SUPPORT_FIXTURES_H_
#define SPEEDLAB_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "speedlab/diffusion/policy.h"
#include "speedlab/envs/rollout.h"

namespace speedlab::testing {

// Scripted demonstrations on the given environment, generated from `seed`.
Dataset ExpertDataset(const EnvConfig& env, int count, std::uint64_t seed,
                      double speed_fraction = 0.4);

// Untrained policy with freshly initialized parameters.
DiffusionPolicy TinyPolicy(const Dataset& dataset, int horizon, int width, int depth,
                           std::uint64_t seed);

// Executes the scripted expert but records denoising chains sampled from a
// diffusion policy, so learning code sees successful episodes with genuine
// chains.
class ExpertChainSampler : public PolicySampler {
 public:
  ExpertChainSampler(const EnvConfig& env, const DiffusionPolicy& base,
                     const Denoiser* actor, int finetune_steps, double min_std);

  int chunk_length() const override { return base_.horizon(); }
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

 private:
  ExpertPolicy expert_;
  const DiffusionPolicy& base_;
  const Denoiser* actor_;
  int finetune_steps_;
  double min_std_;
};

// Fresh, empty directory under the system temp dir.
std::filesystem::path ScratchDir(const std::string& name);

}  // namespace speedlab::testing

#endif  // SPEEDLAB_TESTS_SUPPORT_FIXTURES_H_
