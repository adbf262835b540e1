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

#include "speedlab/rl/finetune.h"

#include <nlohmann/json.hpp>

#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"
#include "speedlab/rl/gae.h"

namespace speedlab {

namespace fs = std::filesystem;

FinetunedPolicy FinetunedPolicy::FromPretrained(const DiffusionPolicy& base,
                                                int finetune_steps) {
  if (finetune_steps < 0 || finetune_steps > base.schedule().num_steps) {
    throw Error("finetune: finetune_steps must be in [0, K]");
  }
  return {base, base.net(), finetune_steps};
}

void FinetunedPolicy::Save(const fs::path& dir) const {
  DiffusionPolicy copy = base;
  copy.Save(dir / "base");
  WriteFloat32File(dir / "actor.bin",
                   std::span<const double>(actor.params().data(), actor.params().size()));
  nlohmann::json m;
  m["format_version"] = 1;
  m["kind"] = "finetuned_policy";
  m["finetune_steps"] = finetune_steps;
  WriteTextFile(dir / "manifest.json", m.dump(2) + "\n");
}

FinetunedPolicy FinetunedPolicy::Load(const fs::path& dir) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(ReadTextFile(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error("checkpoint: bad manifest in " + dir.string());
  }
  if (m.value("kind", "") != "finetuned_policy" || m.value("format_version", -1) != 1) {
    throw Error("unsupported format version");
  }
  FinetunedPolicy p;
  p.base = DiffusionPolicy::Load(dir / "base");
  p.actor = p.base.net();
  p.finetune_steps = m.at("finetune_steps");
  const std::vector<float> params = ReadFloat32File(dir / "actor.bin");
  if (static_cast<int>(params.size()) != p.actor.num_params()) {
    throw Error("checkpoint: actor parameter count mismatch in " + dir.string());
  }
  p.actor.params() =
      Eigen::Map<const Eigen::VectorXf>(params.data(), params.size()).cast<double>();
  return p;
}

std::unique_ptr<PolicySampler> MakeDiffusionSampler(const DiffusionPolicy& base,
                                                    const Denoiser* actor,
                                                    int finetune_steps, double min_std) {
  return std::make_unique<DiffusionSampler>(base, actor, finetune_steps, min_std);
}

namespace {

void SaveLatest(const FinetunedPolicy& policy, const fs::path& dir) {
  const fs::path tmp = dir / "latest.tmp";
  const fs::path dst = dir / "latest";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  policy.Save(tmp);
  fs::remove_all(dst, ec);
  fs::rename(tmp, dst);
}

}  // namespace

FinetuneResult Finetune(const DiffusionPolicy& pretrained, const EnvConfig& env,
                        const DppoConfig& config, const FinetuneOptions& options,
                        std::uint64_t seed) {
  config.Validate(pretrained.schedule().num_steps);
  env.Validate();
  FinetuneResult result{{}, FinetunedPolicy::FromPretrained(pretrained, config.finetune_steps)};
  FinetunedPolicy& policy = result.policy;
  const int ft = config.finetune_steps;

  RngStream init_rng = RngStream(seed, Stream::kInit).Fork(2);
  ValueNet value(pretrained.obs_dim(), config.value_widths, init_rng);
  PpoState ppo = MakePpoState(policy.actor, value, config);
  RngStream reset_rng(seed, Stream::kEnvReset);
  RngStream policy_rng(seed, Stream::kPolicy);
  RngStream minibatch_rng(seed, Stream::kMinibatch);

  long env_steps = 0;
  long failed = 0;
  auto evaluate = [&]() {
    auto sampler = options.make_sampler(policy.base, &policy.actor, ft, options.eval_min_std);
    EvalOptions eo = options.eval;
    eo.exec_horizon = config.exec_horizon;
    EvalReport r = Evaluate(*sampler, env, eo);
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
  if (!options.checkpoint_dir.empty()) {
    fs::create_directories(options.checkpoint_dir);
    SaveLatest(policy, options.checkpoint_dir);
  }
  if (goal_met(result.rows.back())) return result;

  for (long it = 1; env_steps < options.budget_env_steps; ++it) {
    auto sampler = options.make_sampler(policy.base, &policy.actor, ft, config.min_std);
    const std::vector<State> starts = SampleResets(env, config.episodes_per_iter, reset_rng);
    CollectResult batch = Collect(*sampler, policy.actor, value, policy.base.normalizer(),
                                  policy.base.schedule(), env, starts, config, policy_rng);
    env_steps += batch.env_steps;
    failed += batch.failed_episodes;
    ComputeGae(batch.transitions, config.gae_lambda);
    if (config.normalize_advantages) NormalizeAdvantages(batch.transitions);
    const PpoStats stats = PpoUpdate(policy.actor, value, ppo, policy.base.schedule(),
                                     batch.transitions, config, minibatch_rng);

    MetricRow row;
    row.iteration = it;
    row.env_steps = env_steps;
    row.failed_episodes = failed;
    row.losses["policy_loss"] = stats.policy_loss;
    row.losses["value_loss"] = stats.value_loss;
    row.losses["approx_kl"] = stats.approx_kl;
    row.losses["clip_fraction"] = stats.clip_fraction;
    row.losses["epochs"] = stats.epochs_run;
    row.losses["train_success_rate"] =
        1.0 - static_cast<double>(batch.failed_episodes) / batch.episodes.size();
    const bool last = env_steps >= options.budget_env_steps;
    if (it % options.eval_every == 0 || last) row.eval = evaluate();
    if (!options.checkpoint_dir.empty()) SaveLatest(policy, options.checkpoint_dir);
    emit(row);
    if (goal_met(result.rows.back())) break;
  }
  return result;
}

}  // namespace speedlab
