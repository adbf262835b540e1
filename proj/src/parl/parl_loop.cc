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

#include "speedlab/parl/parl_loop.h"

#include <cmath>
#include <deque>

#include "speedlab/core/error.h"

namespace speedlab {

FinetuneResult ParlFinetune(const DiffusionPolicy& pretrained, const EnvConfig& env,
                            const ParlConfig& config, const FinetuneOptions& options,
                            std::uint64_t seed) {
  config.Validate(pretrained.schedule().num_steps);
  env.Validate();
  FinetuneResult result{{}, FinetunedPolicy::FromPretrained(pretrained, config.finetune_steps)};
  FinetunedPolicy& policy = result.policy;

  RngStream init_rng = RngStream(seed, Stream::kInit).Fork(4);
  CriticPair critics(pretrained.obs_dim(), pretrained.net().config().chunk_dim(),
                     config.critic_widths, init_rng);
  nn::AdamOptions critic_opts;
  critic_opts.max_grad_norm = 10.0;
  nn::Adam q_adam(static_cast<int>(critics.q().params.size()), critic_opts);
  nn::Adam v_adam(static_cast<int>(critics.v().params.size()), critic_opts);
  nn::AdamOptions actor_opts;
  actor_opts.max_grad_norm = 1.0;
  nn::Adam actor_adam(policy.actor.num_params(), actor_opts);

  RngStream reset_rng(seed, Stream::kEnvReset);
  RngStream policy_rng(seed, Stream::kPolicy);
  RngStream minibatch_rng(seed, Stream::kMinibatch);
  std::deque<CriticTransition> replay;
  std::deque<DistillSample> chains;
  long env_steps = 0, failed = 0, critic_steps = 0;

  auto evaluate = [&]() {
    PiOptSampler sampler(policy.base, &policy.actor, critics, config, options.eval_min_std);
    EvalOptions eo = options.eval;
    eo.exec_horizon = config.exec_horizon;
    EvalReport r = Evaluate(sampler, env, eo);
    r.env_steps_so_far = env_steps;
    r.failed_episodes_so_far = failed;
    return r;
  };
  auto emit = [&](MetricRow row) {
    if (options.log != nullptr) options.log->Append(row);
    if (options.on_row) options.on_row(row);
    result.rows.push_back(std::move(row));
  };
  auto goal_met = [&](const MetricRow& row) {
    return options.stop_goal && options.baseline_exec_time && row.eval &&
           MeetsGoal(*row.eval, *options.stop_goal, *options.baseline_exec_time);
  };

  MetricRow first;
  first.eval = evaluate();
  emit(first);
  for (long it = 1; !goal_met(result.rows.back()) && env_steps < options.budget_env_steps;
       ++it) {
    PiOptSampler sampler(policy.base, &policy.actor, critics, config, config.min_std);
    const std::vector<State> starts = SampleResets(env, config.episodes_per_iter, reset_rng);
    RolloutOptions ro;
    ro.exec_horizon = config.exec_horizon;
    ro.record_denoising = true;
    ro.gamma = config.gamma;
    const std::vector<EpisodeRecord> episodes =
        RolloutBatch(sampler, env, starts, ro, policy_rng);
    for (const EpisodeRecord& ep : episodes) {
      env_steps += ep.length;
      if (!ep.success) ++failed;
      const int nd = static_cast<int>(ep.decisions.size());
      const Vector final_obs =
          policy.base.normalizer().NormalizeObs(ep.states.back().Observation());
      for (int d = 0; d < nd; ++d) {
        CriticTransition t;
        t.obs = ep.decisions[d].obs;
        t.chunk = ep.decisions[d].rl_action;
        t.reward = ep.decision_rewards[d];
        t.discount = std::pow(config.gamma, ep.decision_lengths[d]);
        t.next_obs = d + 1 < nd ? ep.decisions[d + 1].obs : final_obs;
        t.terminal = d + 1 == nd && ep.success;
        replay.push_back(std::move(t));
        if (static_cast<int>(replay.size()) > config.replay_capacity) replay.pop_front();
        chains.push_back({ep.decisions[d].obs, ep.decisions[d].chain});
        if (static_cast<int>(chains.size()) > config.distill_capacity) chains.pop_front();
      }
    }

    CriticLosses closs;
    for (int u = 0; u < config.critic_updates_per_iter; ++u) {
      std::vector<const CriticTransition*> batch;
      const int last = static_cast<int>(replay.size()) - 1;
      for (int j = 0; j < config.critic_batch; ++j) {
        batch.push_back(&replay[minibatch_rng.UniformInt(0, last)]);
      }
      closs = CriticUpdate(critics, batch, q_adam, v_adam, config.critic_lr);
      if (++critic_steps % config.target_period == 0) critics.SyncTarget();
    }
    double dloss = 0.0;
    for (int u = 0; u < config.distill_updates_per_iter; ++u) {
      std::vector<const DistillSample*> batch;
      const int last = static_cast<int>(chains.size()) - 1;
      for (int j = 0; j < config.distill_batch; ++j) {
        batch.push_back(&chains[minibatch_rng.UniformInt(0, last)]);
      }
      dloss = DistillStep(policy.actor, policy.base.schedule(), batch, config.finetune_steps,
                          config.min_std, actor_adam, config.policy_lr);
    }

    MetricRow row;
    row.iteration = it;
    row.env_steps = env_steps;
    row.failed_episodes = failed;
    row.losses["q_loss"] = closs.q_loss;
    row.losses["v_loss"] = closs.v_loss;
    row.losses["distill_loss"] = dloss;
    const bool last = env_steps >= options.budget_env_steps;
    if (it % options.eval_every == 0 || last) row.eval = evaluate();
    emit(row);
  }
  if (!options.checkpoint_dir.empty()) {
    std::filesystem::create_directories(options.checkpoint_dir);
    policy.Save(options.checkpoint_dir / "latest");
  }
  return result;
}

}  // namespace speedlab
