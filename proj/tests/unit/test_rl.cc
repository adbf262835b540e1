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

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"
#include "speedlab/eval/evaluate.h"
#include "speedlab/rl/collect.h"
#include "speedlab/rl/finetune.h"
#include "speedlab/rl/gae.h"
#include "speedlab/rl/ppo.h"

namespace speedlab {
namespace {

AugmentedTransition Make(int episode, int decision, int k, double reward, double value,
                         double discount, bool end = false, bool terminal = false,
                         double bootstrap = 0.0) {
  AugmentedTransition t;
  t.episode = episode;
  t.decision = decision;
  t.k = k;
  t.env_reward = reward;
  t.value = value;
  t.discount = discount;
  t.episode_end = end;
  t.terminal = terminal;
  t.bootstrap_value = bootstrap;
  return t;
}

TEST(DppoConfig, Validation) {
  DppoConfig c;
  EXPECT_NO_THROW(c.Validate(20));
  auto bad = [](auto mutate) {
    DppoConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](DppoConfig& c) { c.finetune_steps = 0; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.finetune_steps = 21; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.clip_eps_low_k = 0.0; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.gamma = 0.0; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.gae_lambda = 1.5; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.epochs_per_iter = 11; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.minibatch_size = 0; }).Validate(20), Error);
  EXPECT_THROW(bad([](DppoConfig& c) { c.min_std = -0.1; }).Validate(20), Error);
}

TEST(DppoConfig, ClipRadiusInterpolatesLinearly) {
  DppoConfig c;
  c.finetune_steps = 3;
  EXPECT_DOUBLE_EQ(c.ClipEps(1), 0.01);
  EXPECT_DOUBLE_EQ(c.ClipEps(2), 0.0055);
  EXPECT_DOUBLE_EQ(c.ClipEps(3), 0.001);
  c.finetune_steps = 1;
  EXPECT_DOUBLE_EQ(c.ClipEps(1), 0.01);
}

TEST(Gae, LambdaZeroGivesOneStepErrors) {
  std::vector<AugmentedTransition> b = {
      Make(0, 0, 2, 0.0, 0.5, 0.9), Make(0, 0, 1, 1.0, 0.4, 0.8),
      Make(0, 1, 2, 0.0, 0.3, 0.9), Make(0, 1, 1, 0.0, 0.2, 0.8, true, false, 0.7)};
  ComputeGae(b, 0.0);
  EXPECT_NEAR(b[0].advantage, 0.0 + 0.9 * 0.4 - 0.5, 1e-15);
  EXPECT_NEAR(b[1].advantage, 1.0 + 0.8 * 0.3 - 0.4, 1e-15);
  EXPECT_NEAR(b[2].advantage, 0.0 + 0.9 * 0.2 - 0.3, 1e-15);
  EXPECT_NEAR(b[3].advantage, 0.8 * 0.7 - 0.2, 1e-15);
  for (const auto& t : b) EXPECT_NEAR(t.return_target, t.advantage + t.value, 1e-15);
}

TEST(Gae, TerminalIgnoresBootstrap) {
  std::vector<AugmentedTransition> b = {Make(0, 0, 1, 1.0, 0.25, 0.9, true, true, 5.0)};
  ComputeGae(b, 0.95);
  EXPECT_DOUBLE_EQ(b[0].advantage, 0.75);
  EXPECT_DOUBLE_EQ(b[0].return_target, 1.0);
}

TEST(Gae, ZeroRewardsAndValuesGiveZeros) {
  std::vector<AugmentedTransition> b;
  for (int e = 0; e < 3; ++e) {
    for (int d = 0; d < 4; ++d) {
      for (int k = 3; k >= 1; --k) {
        b.push_back(Make(e, d, k, 0.0, 0.0, 0.97, d == 3 && k == 1, e == 1));
      }
    }
  }
  ComputeGae(b, 0.95);
  for (const auto& t : b) {
    EXPECT_EQ(t.advantage, 0.0);
    EXPECT_EQ(t.return_target, 0.0);
  }
}

TEST(Gae, RejectsUnorderedBatches) {
  std::vector<AugmentedTransition> rising = {Make(0, 0, 1, 0, 0, 1), Make(0, 0, 2, 0, 0, 1, true)};
  EXPECT_THROW(ComputeGae(rising, 0.9), Error);
  std::vector<AugmentedTransition> open_end = {Make(0, 0, 1, 0, 0, 1)};
  EXPECT_THROW(ComputeGae(open_end, 0.9), Error);
  std::vector<AugmentedTransition> jump = {Make(0, 0, 1, 0, 0, 1), Make(1, 0, 1, 0, 0, 1, true)};
  EXPECT_THROW(ComputeGae(jump, 0.9), Error);
  std::vector<AugmentedTransition> back = {Make(0, 1, 1, 0, 0, 1), Make(0, 0, 1, 0, 0, 1, true)};
  EXPECT_THROW(ComputeGae(back, 0.9), Error);
  std::vector<AugmentedTransition> empty;
  EXPECT_NO_THROW(ComputeGae(empty, 0.9));
}

TEST(Gae, NormalizeAdvantages) {
  std::vector<AugmentedTransition> b(5);
  for (int i = 0; i < 5; ++i) b[i].advantage = i * i;
  NormalizeAdvantages(b);
  double mean = 0.0, sq = 0.0;
  for (const auto& t : b) mean += t.advantage;
  mean /= 5;
  for (const auto& t : b) sq += (t.advantage - mean) * (t.advantage - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(sq / 4), 1.0, 1e-6);
  std::vector<AugmentedTransition> one(1);
  one[0].advantage = 3.0;
  NormalizeAdvantages(one);
  EXPECT_EQ(one[0].advantage, 3.0);
}

TEST(Surrogate, MonotoneAndGradientMaskAgree) {
  const double eps = 0.1;
  for (double adv : {-2.0, -0.5, 0.5, 2.0}) {
    double prev = ClippedSurrogate(0.5, adv, eps);
    for (double r = 0.51; r <= 1.5; r += 0.01) {
      const double cur = ClippedSurrogate(r, adv, eps);
      if (adv > 0) {
        EXPECT_GE(cur, prev - 1e-15);
      } else {
        EXPECT_LE(cur, prev + 1e-15);
      }
      const double h = 1e-7;
      const double slope = (ClippedSurrogate(r + h, adv, eps) - ClippedSurrogate(r - h, adv, eps)) / (2 * h);
      if (std::abs(r - (1 + eps)) > 1e-3 && std::abs(r - (1 - eps)) > 1e-3) {
        EXPECT_EQ(SurrogateGradientActive(r, adv, eps), std::abs(slope) > 1e-6) << r << " " << adv;
      }
      prev = cur;
    }
  }
}

class CollectedBatch : public ::testing::Test {
 protected:
  void SetUp() override {
    env = EnvConfig::Defaults(EnvId::kPointLift);
    data = testing::ExpertDataset(env, 6, 41);
    base = testing::TinyPolicy(data, 16, 32, 1, 42);
    ft = FinetunedPolicy::FromPretrained(base, 10);
    cfg.value_widths = {16};
    RngStream vrng(43, Stream::kInit);
    value = ValueNet(base.obs_dim(), cfg.value_widths, vrng);
    testing::ExpertChainSampler sampler(env, base, &ft.actor, cfg.finetune_steps, cfg.min_std);
    RngStream reset_rng(44, Stream::kEnvReset);
    RngStream policy_rng(44, Stream::kPolicy);
    const std::vector<State> starts = SampleResets(env, 3, reset_rng);
    batch = Collect(sampler, ft.actor, value, base.normalizer(), base.schedule(), env, starts,
                    cfg, policy_rng);
    ComputeGae(batch.transitions, cfg.gae_lambda);
    NormalizeAdvantages(batch.transitions);
  }

  EnvConfig env;
  Dataset data;
  DiffusionPolicy base;
  FinetunedPolicy ft;
  DppoConfig cfg;
  ValueNet value;
  CollectResult batch;
};

TEST_F(CollectedBatch, CountsAndDiscounts) {
  long steps = 0;
  for (const auto& ep : batch.episodes) steps += ep.length;
  EXPECT_EQ(batch.env_steps, steps);
  EXPECT_EQ(batch.failed_episodes, 0);
  for (const auto& t : batch.transitions) {
    ASSERT_GE(t.k, 1);
    ASSERT_LE(t.k, cfg.finetune_steps);
    if (t.k > 1) {
      EXPECT_DOUBLE_EQ(t.discount, cfg.gamma_denoise);
    }
    EXPECT_EQ(t.episode_end, t.k == 1 && t.terminal) << "expert episodes end in success";
  }
}

TEST_F(CollectedBatch, NonFiniteActorRaisesDivergence) {
  PpoState state = MakePpoState(ft.actor, value, cfg);
  ft.actor.params().setConstant(std::numeric_limits<double>::quiet_NaN());
  RngStream rng(45, Stream::kMinibatch);
  EXPECT_THROW(PpoUpdate(ft.actor, value, state, base.schedule(), batch.transitions, cfg, rng),
               DivergenceError);
}

TEST_F(CollectedBatch, ValueFitReducesLoss) {
  nn::Adam adam(static_cast<int>(value.net().params.size()), nn::AdamOptions{});
  Matrix obs(base.obs_dim(), 4);
  obs.setRandom();
  Vector target(4);
  target << 1.0, -1.0, 0.5, 0.0;
  const double first = value.Fit(obs, target, adam, 1e-2);
  double last = first;
  for (int i = 0; i < 200; ++i) last = value.Fit(obs, target, adam, 1e-2);
  EXPECT_LT(last, 0.1 * first);
  target[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(value.Fit(obs, target, adam, 1e-2), DivergenceError);
}

TEST(FinetunedPolicy, SaveLoadRoundTrip) {
  const EnvConfig env;
  const Dataset data = testing::ExpertDataset(env, 4, 51);
  const DiffusionPolicy base = testing::TinyPolicy(data, 8, 16, 1, 52);
  FinetunedPolicy p = FinetunedPolicy::FromPretrained(base, 7);
  p.actor.params().array() += 0.125;
  const auto dir = testing::ScratchDir("finetuned_ckpt");
  p.Save(dir);
  const FinetunedPolicy q = FinetunedPolicy::Load(dir);
  EXPECT_EQ(q.finetune_steps, 7);
  EXPECT_EQ(q.base.net().params(), base.net().params().cast<float>().cast<double>());
  EXPECT_EQ(q.actor.params(), p.actor.params().cast<float>().cast<double>());
  EXPECT_THROW(FinetunedPolicy::FromPretrained(base, 21), Error);
  WriteTextFile(dir / "manifest.json", "{\"format_version\": 2, \"kind\": \"finetuned_policy\"}");
  EXPECT_THROW(FinetunedPolicy::Load(dir), Error);
}

TEST(Finetune, ZeroBudgetMatchesPretrainedEvaluation) {
  const EnvConfig env;
  const Dataset data = testing::ExpertDataset(env, 4, 61);
  const DiffusionPolicy base = testing::TinyPolicy(data, 8, 16, 1, 62);
  DppoConfig cfg;
  cfg.value_widths = {8};
  FinetuneOptions opt;
  opt.budget_env_steps = 0;
  opt.eval.n_episodes = 6;
  const FinetuneResult r = Finetune(base, env, cfg, opt, 3);
  ASSERT_EQ(r.rows.size(), 1u);
  ASSERT_TRUE(r.rows[0].eval.has_value());
  DiffusionSampler plain(base, nullptr, 0, 0.0);
  const EvalReport ref = Evaluate(plain, env, opt.eval);
  EXPECT_EQ(r.rows[0].eval->successes, ref.successes);
  EXPECT_EQ(r.rows[0].eval->mean_exec_time, ref.mean_exec_time);
  EXPECT_EQ(r.policy.actor.params(), base.net().params());
}

TEST(Finetune, StopsWhenInitialEvaluationMeetsGoal) {
  const EnvConfig env;
  const Dataset data = testing::ExpertDataset(env, 4, 63);
  const DiffusionPolicy base = testing::TinyPolicy(data, 8, 16, 1, 64);
  DppoConfig cfg;
  cfg.value_widths = {8};
  FinetuneOptions opt;
  opt.budget_env_steps = 100000;
  opt.eval.n_episodes = 5;
  opt.stop_goal = Goal{0.95, 1.0};
  opt.baseline_exec_time = 1e6;
  opt.make_sampler = [&](const DiffusionPolicy& b, const Denoiser*, int, double) {
    return std::make_unique<ExpertPolicy>(env, ExpertOptions{}, b.horizon());
  };
  const FinetuneResult r = Finetune(base, env, cfg, opt, 3);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].eval->successes, 5);
}

TEST(Finetune, ShortRunIsDeterministicAndLogged) {
  const EnvConfig env;
  const Dataset data = testing::ExpertDataset(env, 6, 71);
  const DiffusionPolicy base = testing::TinyPolicy(data, 8, 16, 1, 72);
  DppoConfig cfg;
  cfg.value_widths = {16};
  cfg.episodes_per_iter = 3;
  cfg.epochs_per_iter = 2;
  cfg.minibatch_size = 64;
  cfg.actor_lr = 1e-3;
  const auto ckpt_a = testing::ScratchDir("finetune_a");
  const auto ckpt_b = testing::ScratchDir("finetune_b");
  auto run = [&](const std::filesystem::path& ckpt, MetricLogWriter* log) {
    FinetuneOptions opt;
    opt.budget_env_steps = 500;
    opt.eval.n_episodes = 4;
    opt.eval_every = 2;
    opt.checkpoint_dir = ckpt;
    opt.log = log;
    return Finetune(base, env, cfg, opt, 9);
  };
  const auto log_dir = testing::ScratchDir("finetune_log");
  MetricLogWriter writer(log_dir / "metric_log.jsonl", MetricLogHeader{"dppo", "point_lift", 9, std::nullopt, nlohmann::json::object()});
  const FinetuneResult a = run(ckpt_a, &writer);
  const FinetuneResult b = run(ckpt_b, nullptr);
  ASSERT_GE(a.rows.size(), 2u);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].env_steps, b.rows[i].env_steps);
    EXPECT_EQ(a.rows[i].failed_episodes, b.rows[i].failed_episodes);
    EXPECT_EQ(a.rows[i].losses, b.rows[i].losses);
    if (i > 0) {
      EXPECT_GT(a.rows[i].env_steps, a.rows[i - 1].env_steps);
      EXPECT_GE(a.rows[i].failed_episodes, a.rows[i - 1].failed_episodes);
      EXPECT_EQ(a.rows[i].eval.has_value(), i % 2 == 0 || i + 1 == a.rows.size());
    }
  }
  EXPECT_GE(a.rows.back().env_steps, 500);
  EXPECT_LT(a.rows[a.rows.size() - 2].env_steps, 500);
  EXPECT_EQ(a.policy.actor.params(), b.policy.actor.params());
  EXPECT_NE(a.policy.actor.params(), base.net().params());
  EXPECT_EQ(a.policy.base.net().params(), base.net().params());
  const MetricLog log = ReadMetricLog(log_dir / "metric_log.jsonl");
  EXPECT_EQ(log.rows.size(), a.rows.size());
  const FinetunedPolicy latest = FinetunedPolicy::Load(ckpt_a / "latest");
  EXPECT_EQ(latest.actor.params(), a.policy.actor.params().cast<float>().cast<double>());
}

}  // namespace
}  // namespace speedlab
