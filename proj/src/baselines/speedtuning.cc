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

#include "speedlab/baselines/speedtuning.h"

#include <algorithm>
#include <cmath>

#include "speedlab/baselines/accel_policy.h"
#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"

namespace speedlab {

void SpeedTuningConfig::Validate() const {
  if (speed_choices.empty()) throw Error("speedtuning: speed_choices is empty");
  for (double v : speed_choices) {
    if (!(v >= 1.0)) throw Error("speedtuning: speed choices must be >= 1");
  }
  if (q_bins < 2) throw Error("speedtuning: q_bins must be >= 2");
  if (backup_steps < 1) throw Error("speedtuning: backup_steps must be >= 1");
  if (batch_size < 1 || episodes_per_iter < 1 || updates_per_iter < 0) {
    throw Error("speedtuning: batch/episode/update counts must be positive");
  }
  if (target_update_period < 1) throw Error("speedtuning: target_update_period must be >= 1");
  CategoricalSupport{v_min, v_max, q_bins}.Validate();
}

double SpeedTuningConfig::Epsilon(long env_steps, long budget) const {
  const double horizon = epsilon_fraction * static_cast<double>(budget);
  if (horizon <= 0.0) return epsilon_end;
  const double w = std::min(1.0, env_steps / horizon);
  return epsilon_start + w * (epsilon_end - epsilon_start);
}

DistributionalQ::DistributionalQ(int obs_dim, int num_choices,
                                 const CategoricalSupport& support,
                                 const std::vector<int>& widths, RngStream& rng)
    : num_choices_(num_choices), support_(support) {
  support.Validate();
  std::vector<int> sizes = {obs_dim};
  sizes.insert(sizes.end(), widths.begin(), widths.end());
  sizes.push_back(num_choices * support.num_atoms);
  net_ = nn::MlpNet(sizes, rng);
}

std::vector<Matrix> DistributionalQ::Probs(const Matrix& obs) const {
  const Matrix logits = net_.Forward(obs);
  const int n = support_.num_atoms;
  std::vector<Matrix> out;
  for (int a = 0; a < num_choices_; ++a) out.push_back(Softmax(logits.middleRows(a * n, n)));
  return out;
}

Matrix DistributionalQ::ExpectedValues(const Matrix& obs) const {
  const std::vector<Matrix> probs = Probs(obs);
  const Vector z = support_.atoms();
  Matrix q(num_choices_, obs.cols());
  for (int a = 0; a < num_choices_; ++a) q.row(a) = z.transpose() * probs[a];
  return q;
}

std::vector<int> DistributionalQ::Greedy(const Matrix& obs) const {
  const Matrix q = ExpectedValues(obs);
  std::vector<int> out(q.cols());
  for (int j = 0; j < q.cols(); ++j) q.col(j).maxCoeff(&out[j]);
  return out;
}

double DistributionalUpdate(DistributionalQ& online, const DistributionalQ& target,
                            const std::vector<const ReplayItem*>& batch, nn::Adam& adam,
                            double lr) {
  const int b = static_cast<int>(batch.size());
  if (b == 0) return 0.0;
  const int n = online.support().num_atoms;
  const int obs_dim = static_cast<int>(batch[0]->obs.size());
  Matrix obs(obs_dim, b), next_obs(obs_dim, b);
  for (int j = 0; j < b; ++j) {
    obs.col(j) = batch[j]->obs;
    next_obs.col(j) = batch[j]->terminal ? batch[j]->obs : batch[j]->next_obs;
  }
  const std::vector<Matrix> next_probs = target.Probs(next_obs);
  const std::vector<int> next_greedy = target.Greedy(next_obs);

  nn::Mlp::Cache cache;
  const Matrix logits = online.net().Forward(obs, &cache);
  Matrix d_logits = Matrix::Zero(logits.rows(), b);
  double loss = 0.0;
  const Vector point = Vector::Unit(n, 0);
  for (int j = 0; j < b; ++j) {
    const ReplayItem& item = *batch[j];
    const Vector tgt =
        item.terminal
            ? ProjectDistribution(online.support(), point, item.reward, 0.0)
            : ProjectDistribution(online.support(), next_probs[next_greedy[j]].col(j),
                                  item.reward, item.discount);
    const Matrix p = Softmax(logits.block(item.choice * n, j, n, 1));
    loss -= tgt.dot((p.array().max(1e-300)).log().matrix().col(0));
    d_logits.block(item.choice * n, j, n, 1) = (p.col(0) - tgt) / b;
  }
  loss /= b;
  if (!std::isfinite(loss)) throw DivergenceError("speedtuning: non-finite value loss");
  Vector grad = Vector::Zero(online.net().params.size());
  online.net().arch.Backward(online.net().params, cache, d_logits, grad);
  adam.Step(online.net().params, std::move(grad), lr);
  return loss;
}

std::vector<ReplayItem> BuildReplayItems(const std::vector<Vector>& obs,
                                         const std::vector<int>& choices,
                                         const std::vector<double>& rewards,
                                         const std::vector<int>& lengths,
                                         const Vector& final_obs, bool terminal,
                                         double gamma, int backup_steps) {
  const int d_count = static_cast<int>(obs.size());
  std::vector<ReplayItem> items;
  for (int d = 0; d < d_count; ++d) {
    ReplayItem item;
    item.obs = obs[d];
    item.choice = choices[d];
    double discount = 1.0;
    const int end = std::min(d_count, d + backup_steps);
    for (int i = d; i < end; ++i) {
      item.reward += discount * rewards[i];
      discount *= std::pow(gamma, lengths[i]);
    }
    if (end < d_count) {
      item.next_obs = obs[end];
      item.discount = discount;
    } else if (terminal) {
      item.terminal = true;
    } else {
      item.next_obs = final_obs;
      item.discount = discount;
    }
    items.push_back(std::move(item));
  }
  return items;
}

SpeedSelectorSampler::SpeedSelectorSampler(const DiffusionPolicy& base,
                                           const DistributionalQ& q,
                                           const SpeedTuningConfig& config, double epsilon,
                                           double min_std)
    : base_(base), q_(q), config_(config), epsilon_(epsilon), min_std_(min_std) {
  double v_max = 1.0;
  for (double v : config.speed_choices) v_max = std::max(v_max, v);
  if (base.horizon() < RequiredHorizon(v_max, config.exec_horizon)) {
    throw Error("speedtuning: base horizon too short for the largest speed choice");
  }
}

PolicyOutput SpeedSelectorSampler::Sample(std::span<const PolicyQuery> queries,
                                          RngStream& rng, bool) {
  PolicyOutput out;
  if (queries.empty()) return out;
  const Matrix obs = base_.normalizer().NormalizeObs(StackObservations(queries));
  const ChainSample cs =
      SampleChunks(base_.net(), nullptr, 0, base_.schedule(), obs, rng, min_std_, false);
  const std::vector<ActionChunk> chunks =
      ToExecutable(base_.normalizer(), cs.chunks, base_.action_dim());
  const std::vector<int> greedy = q_.Greedy(obs);
  const int n_choices = static_cast<int>(config_.speed_choices.size());
  for (size_t i = 0; i < queries.size(); ++i) {
    int choice = greedy[i];
    if (rng.Uniform() < epsilon_) choice = rng.UniformInt(0, n_choices - 1);
    out.execute.push_back(
        AccelerateChunk(chunks[i], config_.speed_choices[choice], config_.exec_horizon));
    DecisionRecord r;
    r.obs = obs.col(i);
    r.choice = choice;
    out.records.push_back(std::move(r));
  }
  return out;
}

SpeedTuningResult SpeedTune(const DiffusionPolicy& base, const EnvConfig& env,
                            const SpeedTuningConfig& config,
                            const FinetuneOptions& options, std::uint64_t seed) {
  config.Validate();
  const std::uint64_t base_hash = HashDoubles(
      std::span<const double>(base.net().params().data(), base.net().params().size()));
  const CategoricalSupport support{config.v_min, config.v_max, config.q_bins};
  const int n_choices = static_cast<int>(config.speed_choices.size());
  RngStream init_rng = RngStream(seed, Stream::kInit).Fork(3);
  SpeedTuningResult result;
  result.q = DistributionalQ(base.obs_dim(), n_choices, support, config.widths, init_rng);
  DistributionalQ target = result.q;
  nn::AdamOptions opts;
  opts.max_grad_norm = 10.0;
  nn::Adam adam(static_cast<int>(result.q.net().params.size()), opts);

  RngStream reset_rng(seed, Stream::kEnvReset);
  RngStream explore_rng(seed, Stream::kExploration);
  RngStream minibatch_rng(seed, Stream::kMinibatch);
  std::deque<ReplayItem> replay;
  long env_steps = 0, failed = 0, grad_steps = 0;

  auto evaluate = [&]() {
    SpeedSelectorSampler sampler(base, result.q, config, 0.0, options.eval_min_std);
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
    const double eps = config.Epsilon(env_steps, options.budget_env_steps);
    SpeedSelectorSampler sampler(base, result.q, config, eps, options.eval_min_std);
    const std::vector<State> starts = SampleResets(env, config.episodes_per_iter, reset_rng);
    RolloutOptions ro;
    ro.exec_horizon = config.exec_horizon;
    ro.record_denoising = true;
    ro.gamma = config.gamma;
    const std::vector<EpisodeRecord> episodes =
        RolloutBatch(sampler, env, starts, ro, explore_rng);
    double choice_sum = 0.0;
    int choice_count = 0;
    for (const EpisodeRecord& ep : episodes) {
      env_steps += ep.length;
      if (!ep.success) ++failed;
      std::vector<Vector> obs;
      std::vector<int> choices;
      for (const DecisionRecord& r : ep.decisions) {
        obs.push_back(r.obs);
        choices.push_back(r.choice);
        choice_sum += config.speed_choices[r.choice];
        ++choice_count;
      }
      const Vector final_obs = base.normalizer().NormalizeObs(ep.states.back().Observation());
      for (ReplayItem& item :
           BuildReplayItems(obs, choices, ep.decision_rewards, ep.decision_lengths,
                            final_obs, ep.success, config.gamma, config.backup_steps)) {
        replay.push_back(std::move(item));
        if (static_cast<int>(replay.size()) > config.replay_capacity) replay.pop_front();
      }
    }
    const double frac =
        std::min(1.0, static_cast<double>(env_steps) / std::max(1L, options.budget_env_steps));
    const double lr = config.lr_start + frac * (config.lr_end - config.lr_start);
    double loss = 0.0;
    for (int u = 0; u < config.updates_per_iter; ++u) {
      std::vector<const ReplayItem*> batch;
      const int last = static_cast<int>(replay.size()) - 1;
      for (int j = 0; j < config.batch_size; ++j) {
        batch.push_back(&replay[minibatch_rng.UniformInt(0, last)]);
      }
      loss += DistributionalUpdate(result.q, target, batch, adam, lr);
      if (++grad_steps % config.target_update_period == 0) target = result.q;
    }
    MetricRow row;
    row.iteration = it;
    row.env_steps = env_steps;
    row.failed_episodes = failed;
    row.losses["value_loss"] = config.updates_per_iter > 0 ? loss / config.updates_per_iter : 0;
    row.losses["epsilon"] = eps;
    row.losses["mean_speed"] = choice_count > 0 ? choice_sum / choice_count : 0.0;
    const bool last = env_steps >= options.budget_env_steps;
    if (it % options.eval_every == 0 || last) row.eval = evaluate();
    emit(row);
  }
  if (!options.checkpoint_dir.empty()) {
    std::filesystem::create_directories(options.checkpoint_dir);
    const Vector& p = result.q.net().params;
    WriteFloat32File(options.checkpoint_dir / "speed_selector.bin",
                     std::span<const double>(p.data(), p.size()));
  }
  const std::uint64_t after = HashDoubles(
      std::span<const double>(base.net().params().data(), base.net().params().size()));
  if (after != base_hash) throw Error("speedtuning: base policy parameters changed");
  return result;
}

}  // namespace speedlab
