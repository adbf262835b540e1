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

#ifndef SPEEDLAB_ENVS_ROLLOUT_H_
#define SPEEDLAB_ENVS_ROLLOUT_H_

#include <span>
#include <vector>

#include "speedlab/envs/point_env.h"
#include "speedlab/envs/policy.h"
#include "speedlab/envs/scripted_expert.h"

namespace speedlab {

struct EpisodeRecord {
  std::vector<State> states;  // s_0 .. s_T (T + 1 entries)
  Matrix actions;             // A x T executed actions
  std::vector<double> rewards;
  std::vector<char> dones;
  bool success = false;
  int length = 0;
  std::vector<int> decision_steps;         // env step at which each chunk was sampled
  std::vector<DecisionRecord> decisions;  // only with record_denoising
  std::vector<double> decision_rewards;   // intra-chunk discounted reward per decision
  std::vector<int> decision_lengths;      // env steps executed per decision
};

struct RolloutOptions {
  int exec_horizon = 8;
  bool record_denoising = false;
  // Discount applied inside a chunk when summarizing decision rewards.
  double gamma = 0.99;
};

// Runs all episodes in lockstep so a sampler sees one batch per decision
// round. Episode i starts from initial_states[i].
std::vector<EpisodeRecord> RolloutBatch(PolicySampler& policy, const EnvConfig& config,
                                        std::span<const State> initial_states,
                                        const RolloutOptions& options,
                                        RngStream& policy_rng);

// Single episode: reset drawn from rng, policy noise from a fork of rng.
EpisodeRecord Rollout(PolicySampler& policy, const EnvConfig& config, int exec_horizon,
                      RngStream& rng, bool record_denoising);

std::vector<State> SampleResets(const EnvConfig& config, int n, RngStream& rng);

// Replays the scripted expert open loop. The demo for each env slot is
// generated from the state seen at env_step 0.
class ExpertPolicy : public PolicySampler {
 public:
  ExpertPolicy(EnvConfig config, ExpertOptions options, int chunk_length)
      : config_(config), options_(options), chunk_length_(chunk_length) {}
  int chunk_length() const override { return chunk_length_; }
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

 private:
  EnvConfig config_;
  ExpertOptions options_;
  int chunk_length_;
  std::vector<Demonstration> demos_;
};

// Replays fixed demonstrations by env slot, padding with the last action.
class DemoReplayPolicy : public PolicySampler {
 public:
  DemoReplayPolicy(std::vector<Demonstration> demos, int chunk_length)
      : demos_(std::move(demos)), chunk_length_(chunk_length) {}
  int chunk_length() const override { return chunk_length_; }
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

 private:
  std::vector<Demonstration> demos_;
  int chunk_length_;
};

}  // namespace speedlab

#endif  // SPEEDLAB_ENVS_ROLLOUT_H_
