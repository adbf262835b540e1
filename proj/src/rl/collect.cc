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

#include "speedlab/rl/collect.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

std::vector<AugmentedTransition> ExpandEpisodes(
    const std::vector<EpisodeRecord>& episodes, const Denoiser& actor,
    const ValueNet& value, const Normalizer& normalizer, const NoiseSchedule& schedule,
    const DppoConfig& config) {
  const int num_k = schedule.num_steps;
  const int ft = config.finetune_steps;
  std::vector<AugmentedTransition> out;

  // Decision observations and episode-end observations, valued in one pass.
  std::vector<Vector> obs_list;
  for (const EpisodeRecord& ep : episodes) {
    for (const DecisionRecord& d : ep.decisions) obs_list.push_back(d.obs);
    obs_list.push_back(normalizer.NormalizeObs(ep.states.back().Observation()));
  }
  if (obs_list.empty()) return out;
  Matrix obs_mat(obs_list.front().size(), static_cast<int>(obs_list.size()));
  for (size_t i = 0; i < obs_list.size(); ++i) obs_mat.col(i) = obs_list[i];
  const Vector values = value.Predict(obs_mat);

  int vi = 0;
  for (size_t e = 0; e < episodes.size(); ++e) {
    const EpisodeRecord& ep = episodes[e];
    const int num_decisions = static_cast<int>(ep.decisions.size());
    if (num_decisions != static_cast<int>(ep.decision_rewards.size())) {
      throw Error("collect: episode recorded without denoising chains");
    }
    const double end_value = values[vi + num_decisions];
    for (int d = 0; d < num_decisions; ++d) {
      const DecisionRecord& rec = ep.decisions[d];
      if (static_cast<int>(rec.chain.size()) != num_k + 1) {
        throw Error("collect: chain length does not match the schedule");
      }
      const double v = values[vi + d];
      const bool last = d + 1 == num_decisions;
      for (int k = ft; k >= 1; --k) {
        AugmentedTransition t;
        t.episode = static_cast<int>(e);
        t.decision = d;
        t.k = k;
        t.obs = rec.obs;
        t.a_k = rec.chain[num_k - k];
        t.a_km1 = rec.chain[num_k - k + 1];
        t.value = v;
        if (k > 1) {
          t.discount = config.gamma_denoise;
        } else {
          t.env_reward = ep.decision_rewards[d];
          t.discount = std::pow(config.gamma, ep.decision_lengths[d]);
          if (last) {
            t.episode_end = true;
            t.terminal = ep.success;
            t.bootstrap_value = ep.success ? 0.0 : end_value;
          }
        }
        out.push_back(std::move(t));
      }
    }
    vi += num_decisions + 1;
  }

  std::vector<const AugmentedTransition*> ptrs;
  ptrs.reserve(out.size());
  for (const auto& t : out) ptrs.push_back(&t);
  constexpr size_t kChunk = 4096;
  for (size_t start = 0; start < ptrs.size(); start += kChunk) {
    const size_t stop = std::min(ptrs.size(), start + kChunk);
    std::vector<const AugmentedTransition*> part(ptrs.begin() + start, ptrs.begin() + stop);
    const Vector lp = TransitionLogProbs(actor, schedule, part, config);
    for (size_t i = start; i < stop; ++i) out[i].log_prob_old = lp[i - start];
  }
  return out;
}

CollectResult Collect(PolicySampler& sampler, const Denoiser& actor,
                      const ValueNet& value, const Normalizer& normalizer,
                      const NoiseSchedule& schedule, const EnvConfig& env,
                      std::span<const State> starts, const DppoConfig& config,
                      RngStream& policy_rng) {
  RolloutOptions ro;
  ro.exec_horizon = config.exec_horizon;
  ro.record_denoising = true;
  ro.gamma = config.gamma;
  CollectResult result;
  result.episodes = RolloutBatch(sampler, env, starts, ro, policy_rng);
  for (const EpisodeRecord& ep : result.episodes) {
    result.env_steps += ep.length;
    if (!ep.success) ++result.failed_episodes;
  }
  result.transitions =
      ExpandEpisodes(result.episodes, actor, value, normalizer, schedule, config);
  return result;
}

}  // namespace speedlab
