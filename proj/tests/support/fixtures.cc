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

#include "fixtures.h"

#include <unistd.h>

#include "speedlab/augment/accel.h"
#include "speedlab/diffusion/pretrain.h"
#include "speedlab/envs/scripted_expert.h"

namespace speedlab::testing {

Dataset ExpertDataset(const EnvConfig& env, int count, std::uint64_t seed,
                      double speed_fraction) {
  RngStream rng(seed, Stream::kDemos);
  ExpertOptions options;
  options.speed_fraction = speed_fraction;
  Dataset dataset;
  dataset.env_id = ToString(env.env_id);
  for (int i = 0; i < count; ++i) dataset.demos.push_back(ScriptedExpert(env, options, rng));
  return dataset;
}

DiffusionPolicy TinyPolicy(const Dataset& dataset, int horizon, int width, int depth,
                           std::uint64_t seed) {
  PolicyConfig config;
  config.horizon = horizon;
  config.exec_horizon = 8;
  config.width = width;
  config.depth = depth;
  config.train_steps = 0;
  return Pretrain(dataset, AugmentConfig{}, config, seed).policy;
}

ExpertChainSampler::ExpertChainSampler(const EnvConfig& env, const DiffusionPolicy& base,
                                       const Denoiser* actor, int finetune_steps,
                                       double min_std)
    : expert_(env, ExpertOptions{}, base.horizon()),
      base_(base),
      actor_(actor),
      finetune_steps_(finetune_steps),
      min_std_(min_std) {}

PolicyOutput ExpertChainSampler::Sample(std::span<const PolicyQuery> queries,
                                        RngStream& rng, bool record) {
  PolicyOutput out = expert_.Sample(queries, rng, false);
  if (!record || queries.empty()) return out;
  const Matrix obs = base_.normalizer().NormalizeObs(StackObservations(queries));
  const ChainSample cs = SampleChunks(base_.net(), actor_, finetune_steps_,
                                      base_.schedule(), obs, rng, min_std_, true);
  for (int i = 0; i < obs.cols(); ++i) {
    DecisionRecord r;
    r.obs = obs.col(i);
    for (const Matrix& level : cs.chain) r.chain.push_back(level.col(i));
    r.rl_action = cs.chunks.col(i);
    out.records.push_back(std::move(r));
  }
  return out;
}

std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("speedlab_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace speedlab::testing
