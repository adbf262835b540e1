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

#include "speedlab/envs/rollout.h"

#include <algorithm>
#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

std::vector<EpisodeRecord> RolloutBatch(PolicySampler& policy, const EnvConfig& config,
                                        std::span<const State> initial_states,
                                        const RolloutOptions& options,
                                        RngStream& policy_rng) {
  if (options.exec_horizon < 1) throw Error("rollout: exec_horizon must be >= 1");
  if (policy.chunk_length() < options.exec_horizon) {
    throw Error("rollout: policy chunk length shorter than exec_horizon");
  }
  const int n = static_cast<int>(initial_states.size());
  std::vector<EpisodeRecord> episodes(n);
  std::vector<State> current(initial_states.begin(), initial_states.end());
  std::vector<std::vector<Vector>> actions(n);
  std::vector<char> active(n, 1);
  for (int i = 0; i < n; ++i) episodes[i].states.push_back(current[i]);

  int remaining = n;
  while (remaining > 0) {
    std::vector<PolicyQuery> queries;
    for (int i = 0; i < n; ++i) {
      if (active[i]) queries.push_back({&current[i], i, episodes[i].length});
    }
    PolicyOutput out = policy.Sample(queries, policy_rng, options.record_denoising);
    for (size_t q = 0; q < queries.size(); ++q) {
      const int i = queries[q].env_index;
      EpisodeRecord& ep = episodes[i];
      ep.decision_steps.push_back(ep.length);
      if (options.record_denoising && q < out.records.size()) {
        ep.decisions.push_back(std::move(out.records[q]));
      }
      const ActionChunk& chunk = out.execute[q];
      double chunk_reward = 0.0;
      double discount = 1.0;
      int executed = 0;
      for (int j = 0; j < options.exec_horizon; ++j) {
        const Vector a = chunk.actions.col(j);
        const StepResult r = Step(current[i], a, config);
        current[i] = r.next_state;
        actions[i].push_back(a);
        ep.states.push_back(current[i]);
        ep.rewards.push_back(r.reward);
        ++ep.length;
        ++executed;
        chunk_reward += discount * r.reward;
        discount *= options.gamma;
        const bool truncated = ep.length >= config.max_episode_steps;
        ep.dones.push_back(r.done || truncated ? 1 : 0);
        if (r.done || truncated) {
          ep.success = r.success;
          active[i] = 0;
          --remaining;
          break;
        }
      }
      ep.decision_rewards.push_back(chunk_reward);
      ep.decision_lengths.push_back(executed);
    }
  }
  for (int i = 0; i < n; ++i) {
    EpisodeRecord& ep = episodes[i];
    ep.actions.resize(kActionDim, ep.length);
    for (int t = 0; t < ep.length; ++t) ep.actions.col(t) = actions[i][t];
  }
  return episodes;
}

EpisodeRecord Rollout(PolicySampler& policy, const EnvConfig& config, int exec_horizon,
                      RngStream& rng, bool record_denoising) {
  const State start = Reset(config, rng);
  RngStream policy_rng = rng.Fork(1);
  RolloutOptions options;
  options.exec_horizon = exec_horizon;
  options.record_denoising = record_denoising;
  auto episodes = RolloutBatch(policy, config, std::span<const State>(&start, 1),
                               options, policy_rng);
  return std::move(episodes.front());
}

std::vector<State> SampleResets(const EnvConfig& config, int n, RngStream& rng) {
  std::vector<State> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) states.push_back(Reset(config, rng));
  return states;
}

namespace {

ActionChunk SliceDemo(const Demonstration& demo, int start, int length) {
  Matrix chunk(demo.actions.rows(), length);
  const int last = demo.length() - 1;
  for (int j = 0; j < length; ++j) {
    chunk.col(j) = demo.actions.col(std::min(start + j, last)).cast<double>();
  }
  return ActionChunk(std::move(chunk));
}

}  // namespace

PolicyOutput ExpertPolicy::Sample(std::span<const PolicyQuery> queries, RngStream&,
                                  bool) {
  PolicyOutput out;
  for (const PolicyQuery& q : queries) {
    if (q.env_index >= static_cast<int>(demos_.size())) demos_.resize(q.env_index + 1);
    if (q.env_step == 0) demos_[q.env_index] = ScriptedExpertFrom(config_, options_, *q.state);
    out.execute.push_back(SliceDemo(demos_[q.env_index], q.env_step, chunk_length_));
  }
  return out;
}

PolicyOutput DemoReplayPolicy::Sample(std::span<const PolicyQuery> queries, RngStream&,
                                      bool) {
  PolicyOutput out;
  for (const PolicyQuery& q : queries) {
    const Demonstration& demo = demos_.at(q.env_index);
    out.execute.push_back(SliceDemo(demo, q.env_step, chunk_length_));
  }
  return out;
}

}  // namespace speedlab
