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
#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"
#include "speedlab/envs/point_env.h"
#include "speedlab/eval/chunk_scatter.h"
#include "speedlab/eval/evaluate.h"
#include "speedlab/eval/goal.h"
#include "speedlab/eval/metric_log.h"

namespace speedlab {
namespace {

EpisodeRecord Episode(int length, bool success) {
  EpisodeRecord ep;
  ep.length = length;
  ep.success = success;
  return ep;
}

EvalReport Report(double success, std::optional<double> exec_time) {
  EvalReport r;
  r.n_episodes = 100;
  r.successes = static_cast<int>(std::lround(success * 100));
  r.success_rate = success;
  r.mean_exec_time = exec_time;
  return r;
}

MetricRow Row(long it, long steps, long failed, std::optional<EvalReport> eval) {
  MetricRow r;
  r.iteration = it;
  r.env_steps = steps;
  r.failed_episodes = failed;
  r.eval = std::move(eval);
  return r;
}

TEST(Summarize, Fixtures) {
  const std::vector<EpisodeRecord> eps = {Episode(10, true), Episode(20, true),
                                          Episode(50, false), Episode(30, true)};
  const EvalReport r = Summarize(eps);
  EXPECT_EQ(r.n_episodes, 4);
  EXPECT_EQ(r.successes, 3);
  EXPECT_DOUBLE_EQ(r.success_rate, 0.75);
  ASSERT_TRUE(r.mean_exec_time.has_value());
  EXPECT_DOUBLE_EQ(*r.mean_exec_time, 20.0);
  EXPECT_NEAR(*r.exec_time_std, std::sqrt(200.0 / 3.0), 1e-12);

  const std::vector<EpisodeRecord> failures = {Episode(5, false), Episode(7, false)};
  const EvalReport f = Summarize(failures);
  EXPECT_EQ(f.success_rate, 0.0);
  EXPECT_FALSE(f.mean_exec_time.has_value());
  EXPECT_FALSE(f.exec_time_std.has_value());
  EXPECT_EQ(Summarize(std::vector<EpisodeRecord>{}).n_episodes, 0);
}

TEST(Evaluate, ExpertSucceedsAndIsDeterministic) {
  const EnvConfig env = EnvConfig::Defaults(EnvId::kPointLift);
  ExpertPolicy expert(env, ExpertOptions{}, 16);
  EvalOptions opt;
  opt.n_episodes = 100;
  const EvalReport a = Evaluate(expert, env, opt);
  const EvalReport b = Evaluate(expert, env, opt);
  EXPECT_GE(a.success_rate, 0.99);
  EXPECT_DOUBLE_EQ(a.success_rate * a.n_episodes, a.successes);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.mean_exec_time, b.mean_exec_time);
  opt.n_episodes = 0;
  EXPECT_THROW(Evaluate(expert, env, opt), Error);
}

TEST(Evaluate, LeavesPolicyUntouched) {
  const EnvConfig env;
  const Dataset ds = testing::ExpertDataset(env, 4, 31);
  const DiffusionPolicy policy = testing::TinyPolicy(ds, 8, 16, 1, 32);
  const auto hash = [&] {
    return HashDoubles(std::span<const double>(policy.net().params().data(),
                                               policy.net().params().size()));
  };
  const std::uint64_t before = hash();
  DiffusionSampler sampler(policy, nullptr, 0, 0.0);
  EvalOptions opt;
  opt.n_episodes = 6;
  const EvalReport a = Evaluate(sampler, env, opt);
  const EvalReport b = Evaluate(sampler, env, opt);
  EXPECT_EQ(hash(), before);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.mean_exec_time, b.mean_exec_time);
}

TEST(Goal, MeetsGoalThresholds) {
  const Goal g{0.95, 1.5};
  EXPECT_TRUE(MeetsGoal(Report(0.95, 40.0), g, 60.0));
  EXPECT_FALSE(MeetsGoal(Report(0.94, 30.0), g, 60.0));
  EXPECT_FALSE(MeetsGoal(Report(0.99, 40.5), g, 60.0));
  EXPECT_FALSE(MeetsGoal(Report(1.0, std::nullopt), g, 60.0));
}

TEST(Goal, StepsToGoalFindsFirstCrossing) {
  const Goal g{0.95, 1.5};
  std::vector<MetricRow> rows = {Row(0, 0, 0, Report(0.90, 50.0))};
  for (int it = 1; it <= 10; ++it) {
    std::optional<EvalReport> e;
    if (it % 2 == 1) e = Report(it >= 7 ? 0.96 : 0.93, it >= 7 ? 39.0 : 45.0);
    rows.push_back(Row(it, 1000L * it, 3L * it, e));
  }
  const auto hit = StepsToGoal(rows, g, 60.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->iteration, 7);
  EXPECT_EQ(hit->env_steps, 7000);
  EXPECT_EQ(hit->failed_episodes, 21);
  EXPECT_FALSE(StepsToGoal(rows, Goal{0.99, 1.5}, 60.0).has_value());
  const auto vacuous = StepsToGoal(rows, Goal{0.0, 1.0}, 60.0);
  ASSERT_TRUE(vacuous.has_value());
  EXPECT_EQ(vacuous->iteration, 0);
  EXPECT_THROW(StepsToGoal(rows, Goal{0.95, 0.5}, 60.0), Error);
}

TEST(Goal, StricterGoalsAreNeverReachedEarlier) {
  RngStream rng(17, Stream::kEval);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MetricRow> rows;
    for (int it = 0; it < 30; ++it) {
      std::optional<EvalReport> e;
      if (rng.Uniform() < 0.7) e = Report(rng.Uniform(0.5, 1.0), rng.Uniform(20.0, 80.0));
      rows.push_back(Row(it, 100L * it, it, e));
    }
    const double s1 = rng.Uniform(0.5, 1.0), s2 = rng.Uniform(s1, 1.0);
    const double x1 = rng.Uniform(1.0, 2.0), x2 = rng.Uniform(x1, 2.5);
    const auto loose = StepsToGoal(rows, Goal{s1, x1}, 60.0);
    const auto strict = StepsToGoal(rows, Goal{s2, x2}, 60.0);
    if (strict) {
      ASSERT_TRUE(loose.has_value());
      EXPECT_LE(loose->env_steps, strict->env_steps);
    }
  }
}

TEST(Goal, ParseAndFormat) {
  const Goal g = ParseGoal("0.95,x1.5");
  EXPECT_DOUBLE_EQ(g.target_success, 0.95);
  EXPECT_DOUBLE_EQ(g.speedup, 1.5);
  EXPECT_EQ(ToString(g), "0.95,x1.5");
  EXPECT_DOUBLE_EQ(ParseGoal("0.9,2").speedup, 2.0);
  EXPECT_DOUBLE_EQ(ParseGoal(ToString(Goal{0.8, 1.25})).target_success, 0.8);
  for (const char* bad : {"0.95", "abc,x2", "1.2,x2", "0.9,x0.5", "0.9,x", "0.9,x2y"}) {
    EXPECT_THROW(ParseGoal(bad), Error) << bad;
  }
}

TEST(MetricLog, RoundTrip) {
  const auto dir = testing::ScratchDir("metric_log");
  MetricLogHeader h;
  h.method = "speedaug";
  h.env_id = "point_lift";
  h.seed = 42;
  h.baseline_exec_time = 61.5;
  h.extra["algorithm"] = "dppo";
  {
    MetricLogWriter w(dir / "log.jsonl", h);
    EvalReport e = Report(0.5, 44.25);
    e.exec_time_std = 3.5;
    e.env_steps_so_far = 1200;
    w.Append(Row(0, 0, 0, e));
    MetricRow r = Row(1, 1200, 4, std::nullopt);
    r.losses["policy_loss"] = -0.125;
    w.Append(r);
    w.Append(Row(2, 2400, 9, Report(0.0, std::nullopt)));
  }
  const MetricLog log = ReadMetricLog(dir / "log.jsonl");
  EXPECT_EQ(log.header.method, "speedaug");
  EXPECT_EQ(log.header.seed, 42u);
  EXPECT_EQ(log.header.baseline_exec_time, 61.5);
  EXPECT_EQ(log.header.extra["algorithm"], "dppo");
  ASSERT_EQ(log.rows.size(), 3u);
  EXPECT_EQ(log.rows[0].eval->mean_exec_time, 44.25);
  EXPECT_EQ(log.rows[0].eval->exec_time_std, 3.5);
  EXPECT_EQ(log.rows[0].eval->env_steps_so_far, 1200);
  EXPECT_FALSE(log.rows[1].eval.has_value());
  EXPECT_EQ(log.rows[1].losses.at("policy_loss"), -0.125);
  EXPECT_EQ(log.rows[2].failed_episodes, 9);
  EXPECT_FALSE(log.rows[2].eval->mean_exec_time.has_value());

  EXPECT_THROW(ReadMetricLog(dir / "absent.jsonl"), Error);
  WriteTextFile(dir / "bad.jsonl", "{\"type\": \"row\"}\n");
  EXPECT_THROW(ReadMetricLog(dir / "bad.jsonl"), Error);
  WriteTextFile(dir / "garbled.jsonl", "not json\n");
  EXPECT_THROW(ReadMetricLog(dir / "garbled.jsonl"), Error);
}

TEST(ChunkScatter, ExpertRowsAndFlags) {
  const EnvConfig env = EnvConfig::Defaults(EnvId::kPointLift);
  ExpertPolicy expert(env, ExpertOptions{}, 16);
  const State reset = ResetWithObjectX(env, 0.0);
  RngStream rng(1, Stream::kEval);
  const auto rows = ChunkScatter(expert, env, reset, 5, 12, 8, rng);
  ASSERT_EQ(rows.size(), 60u);
  for (int s = 0; s < 5; ++s) {
    int last = 0, grip = 0;
    for (const ScatterRow& r : rows) {
      if (r.sample_id != s) continue;
      last += r.is_last_step ? 1 : 0;
      grip += r.is_first_grip_close ? 1 : 0;
    }
    EXPECT_EQ(last, 1);
    EXPECT_LE(grip, 1);
  }
  // A deterministic expert produces identical samples.
  EXPECT_NEAR(FinalDisplacementVariance(rows, reset), 0.0, 1e-20);
  EXPECT_TRUE(ChunkScatter(expert, env, reset, 0, 12, 8, rng).empty());
  EXPECT_THROW(ChunkScatter(expert, env, reset, 3, 0, 8, rng), Error);
}

TEST(ChunkScatter, DeterministicGivenSeed) {
  const EnvConfig env;
  const Dataset ds = testing::ExpertDataset(env, 4, 33);
  const DiffusionPolicy policy = testing::TinyPolicy(ds, 8, 16, 1, 34);
  DiffusionSampler sampler(policy, nullptr, 0, 0.0);
  const State reset = ResetWithObjectX(env, 0.0);
  RngStream a(3, Stream::kEval), b(3, Stream::kEval);
  const auto x = ChunkScatter(sampler, env, reset, 4, 12, 8, a);
  const auto y = ChunkScatter(sampler, env, reset, 4, 12, 8, b);
  ASSERT_EQ(x.size(), y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].ee_x, y[i].ee_x);
    EXPECT_EQ(x[i].ee_z, y[i].ee_z);
  }
  EXPECT_GT(FinalDisplacementVariance(x, reset), 0.0);
}

TEST(ChunkScatter, DisplacementVarianceFixture) {
  State reset;
  reset.proprio = Vector::Zero(3);
  reset.proprio << 1.0, 2.0, 0.0;
  std::vector<ScatterRow> rows(3);
  rows[0].ee_x = 2.0;
  rows[0].ee_z = 2.0;
  rows[0].is_last_step = true;
  rows[1].ee_x = 100.0;  // not a final step
  rows[2].ee_x = 4.0;
  rows[2].ee_z = 4.0;
  rows[2].is_last_step = true;
  // Var(dx) = 1 over {1, 3}; Var(dz) = 1 over {0, 2}.
  EXPECT_DOUBLE_EQ(FinalDisplacementVariance(rows, reset), 2.0);
  EXPECT_EQ(FinalDisplacementVariance({}, reset), 0.0);

  const auto dir = testing::ScratchDir("scatter");
  WriteScatter(dir / "scatter.tsv", rows);
  std::ifstream in(dir / "scatter.tsv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sample_id\tstep\tee_x\tee_z\tgrip\tis_last_step\tis_first_grip_close");
  int count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, 3);
}

}  // namespace
}  // namespace speedlab
