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

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.h"
#include "speedlab/cli/commands.h"
#include "speedlab/cli/plot.h"
#include "speedlab/cli/run_config.h"
#include "speedlab/core/archive.h"
#include "speedlab/core/dataset.h"
#include "speedlab/core/error.h"

namespace speedlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Desk-scale configuration that runs every stage in well under a second.
json TinyConfigJson(const fs::path& out) {
  json j = ToJson(RunConfig{});
  for (const char* o : {"seeds=[1]", "demos.count=6", "pretrain.horizon=8",
                        "pretrain.exec_horizon=4", "pretrain.width=16", "pretrain.depth=1",
                        "pretrain.train_steps=10", "pretrain.batch_size=16",
                        "finetune.budget_env_steps=100", "finetune.eval_every=1",
                        "finetune.long_horizon=16", "finetune.accel_policy_v=2",
                        "finetune.dppo.value_widths=[8]", "finetune.dppo.episodes_per_iter=2",
                        "finetune.dppo.epochs_per_iter=1", "finetune.dppo.minibatch_size=64",
                        "eval.n_episodes=4", "analyze.n_samples=3"}) {
    ApplyOverride(j, o);
  }
  j["output_dir"] = out.string();
  return j;
}

RunConfig TinyConfig(const fs::path& out) { return RunConfigFromJson(TinyConfigJson(out)); }

// Pre-trains no_accel, then replaces its evaluation with a fixture report so
// later stages have a baseline execution time; a 10-step policy never succeeds.
void PrepareBaseline(RunConfig c, std::ostream& log) {
  CmdGenDemos(c, std::nullopt, std::nullopt, log);
  c.baseline = "no_accel";
  CmdPretrain(c, log);
  EvalReport fixture;
  fixture.n_episodes = 4;
  fixture.successes = 4;
  fixture.success_rate = 1.0;
  fixture.mean_exec_time = 60.0;
  fixture.exec_time_std = 0.0;
  for (std::uint64_t seed : c.seeds) {
    WriteTextFile(RunDir(c, "no_accel", seed) / "pretrain" / "eval.json",
                  ToJson(fixture).dump(2));
  }
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.seeds = {3, 4};
  c.baseline = "accel_demo";
  c.policy.width = 64;
  c.augment.v_max = 2.5;
  c.finetune.dppo.actor_lr = 3e-5;
  c.finetune.stop_at_goal = true;
  c.eval.goals = {Goal{0.9, 2.0}, Goal{0.95, 1.5}};
  c.sweep_v_max = {2.0, 4.0};
  const RunConfig d = RunConfigFromJson(ToJson(c));
  EXPECT_EQ(ToJson(d), ToJson(c));
  EXPECT_EQ(d.seeds, c.seeds);
  EXPECT_EQ(d.eval.goals.size(), 2u);
  EXPECT_DOUBLE_EQ(d.eval.goals[0].speedup, 2.0);
}

TEST(RunConfig, UnknownKeysAndBadValuesAreRejected) {
  json j = ToJson(RunConfig{});
  j["pretrain"]["widht"] = 3;
  EXPECT_THROW(RunConfigFromJson(j), Error);
  j = ToJson(RunConfig{});
  j["colour"] = "red";
  EXPECT_THROW(RunConfigFromJson(j), Error);
  j = ToJson(RunConfig{});
  j["pretrain"]["width"] = "wide";
  EXPECT_THROW(RunConfigFromJson(j), Error);
  j = ToJson(RunConfig{});
  j["seeds"] = json::array();
  EXPECT_THROW(RunConfigFromJson(j), Error);
  j = ToJson(RunConfig{});
  j["finetune"]["algorithm"] = "sac";
  EXPECT_THROW(RunConfigFromJson(j), Error);
  EXPECT_NO_THROW(RunConfigFromJson(json::object()));
}

TEST(RunConfig, Overrides) {
  json j = json::object();
  ApplyOverride(j, "finetune.dppo.actor_lr=1e-4");
  ApplyOverride(j, "baseline=no_accel");
  ApplyOverride(j, "eval.goals=[\"0.9,x2\"]");
  const RunConfig c = RunConfigFromJson(j);
  EXPECT_DOUBLE_EQ(c.finetune.dppo.actor_lr, 1e-4);
  EXPECT_EQ(c.baseline, "no_accel");
  EXPECT_DOUBLE_EQ(c.eval.goals.at(0).target_success, 0.9);
  EXPECT_THROW(ApplyOverride(j, "novalue"), Error);
  EXPECT_THROW(ApplyOverride(j, "=3"), Error);
  EXPECT_THROW(ApplyOverride(j, "baseline.x=1"), Error);
  EXPECT_THROW(ApplyOverride(j, "a..b=1"), Error);
}

TEST(Commands, GenDemosIsReproducibleAndResumable) {
  const fs::path root = testing::ScratchDir("cli_gen");
  RunConfig c = TinyConfig(root / "a");
  std::ostringstream log;
  CmdGenDemos(c, 200, std::nullopt, log);
  const Dataset ds = LoadDataset(DemoDir(c, 1));
  EXPECT_EQ(ds.demos.size(), 200u);
  for (const Demonstration& d : ds.demos) EXPECT_TRUE(d.success);
  CmdGenDemos(c, 200, std::nullopt, log);
  EXPECT_NE(log.str().find("up to date"), std::string::npos);
  RunConfig other = TinyConfig(root / "b");
  CmdGenDemos(other, 200, std::nullopt, log);
  for (const auto& entry : fs::directory_iterator(DemoDir(c, 1))) {
    const fs::path twin = DemoDir(other, 1) / entry.path().filename();
    ASSERT_TRUE(fs::exists(twin)) << twin;
    EXPECT_EQ(HashFile(entry.path()), HashFile(twin)) << entry.path().filename();
  }
  EXPECT_THROW(CmdGenDemos(c, 0, std::nullopt, log), Error);
}

TEST(Commands, MissingPrerequisitesAreNamed) {
  const fs::path root = testing::ScratchDir("cli_missing");
  RunConfig c = TinyConfig(root);
  std::ostringstream log;
  try {
    CmdPretrain(c, log);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("missing prerequisite"), std::string::npos);
  }
  CmdGenDemos(c, std::nullopt, std::nullopt, log);
  c.baseline = "speedaug";
  CmdPretrain(c, log);
  // Fine-tuning needs the no_accel baseline execution time.
  EXPECT_THROW(CmdFinetune(c, log), Error);
  EXPECT_THROW(CmdPlot(c, {}, log), Error);
}

TEST(Commands, PipelineStagesAndResume) {
  const fs::path root = testing::ScratchDir("cli_pipeline");
  RunConfig c = TinyConfig(root);
  std::ostringstream log;
  PrepareBaseline(c, log);
  for (const char* name : {"no_accel", "speedaug", "accel_policy"}) {
    c.baseline = name;
    CmdPretrain(c, log);
    CmdFinetune(c, log);
    CmdEval(c, log);
    EXPECT_TRUE(fs::exists(RunDir(c, name, 1) / "pretrain" / "eval.json")) << name;
    EXPECT_TRUE(fs::exists(RunDir(c, name, 1) / "finetune" / "summary.json")) << name;
    EXPECT_TRUE(fs::exists(RunDir(c, name, 1) / "eval" / "report.json")) << name;
    EXPECT_TRUE(fs::exists(RunDir(c, name, 1) / "config.json")) << name;
  }
  const MetricLog m = ReadMetricLog(RunDir(c, "speedaug", 1) / "finetune" / "metric_log.jsonl");
  EXPECT_EQ(m.header.method, "speedaug");
  EXPECT_EQ(m.header.baseline_exec_time, 60.0);
  EXPECT_GE(m.rows.back().env_steps, 100);

  const std::uint64_t before =
      HashFile(RunDir(c, "speedaug", 1) / "finetune" / "metric_log.jsonl");
  c.baseline = "speedaug";
  std::ostringstream again;
  CmdPretrain(c, again);
  CmdFinetune(c, again);
  EXPECT_NE(again.str().find("up to date"), std::string::npos);
  EXPECT_EQ(HashFile(RunDir(c, "speedaug", 1) / "finetune" / "metric_log.jsonl"), before);

  CmdAnalyze(c, log);
  const json summary =
      json::parse(ReadTextFile(RunDir(c, "speedaug", 1) / "analyze" / "summary.json"));
  EXPECT_GE(summary.at("final_displacement_variance").get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(RunDir(c, "speedaug", 1) / "analyze" / "scatter.tsv"));

  CmdPlot(c, {}, log);
  int svg = 0, tsv = 0;
  for (const auto& e : fs::directory_iterator(root / "plots")) {
    svg += e.path().extension() == ".svg" ? 1 : 0;
    tsv += e.path().extension() == ".tsv" ? 1 : 0;
  }
  EXPECT_EQ(svg, 4);
  EXPECT_EQ(tsv, 4);
  const std::string body = ReadTextFile(root / "plots" / "success_rate_vs_env_steps.svg");
  EXPECT_EQ(body.rfind("<svg", 0), 0u);
}

TEST(Commands, SweepProducesOneRunPerVmax) {
  const fs::path root = testing::ScratchDir("cli_sweep");
  RunConfig c = TinyConfig(root);
  std::ostringstream log;
  PrepareBaseline(c, log);
  CmdSweep(c, log);
  for (const char* run : {"speedaug_vmax2", "speedaug_vmax3", "speedaug_vmax4"}) {
    EXPECT_TRUE(fs::exists(RunDir(c, run, 1) / "finetune" / "summary.json")) << run;
    const json cfg = json::parse(ReadTextFile(RunDir(c, run, 1) / "config.json"));
    EXPECT_EQ(cfg["pretrain"]["augment"]["mode"], "uniform");
  }
  const json cfg = json::parse(ReadTextFile(RunDir(c, "speedaug_vmax4", 1) / "config.json"));
  EXPECT_DOUBLE_EQ(cfg["pretrain"]["augment"]["v_max"].get<double>(), 4.0);
}

TEST(Plot, RendersSeries) {
  const std::string svg = RenderSvg({Series{"a", {0, 1, 2}, {0.1, 0.5, 0.9}},
                                     Series{"b", {0, 2}, {0.2, std::nan("")}}},
                                    "success", "steps", "rate");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("success"), std::string::npos);
}

int RunCli(const std::string& args, const fs::path& out) {
  const std::string cmd =
      std::string(SPEEDLAB_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Binary, ExitCodesAndStageMessages) {
  const fs::path root = testing::ScratchDir("cli_binary");
  WriteTextFile(root / "config.json", TinyConfigJson(root / "runs").dump(2));
  const std::string cfg = "--config " + (root / "config.json").string();
  EXPECT_EQ(RunCli("gen-demos " + cfg + " --count 3", root / "gen.txt"), 0);
  EXPECT_NE(ReadTextFile(root / "gen.txt").find("wrote 3 demos"), std::string::npos);
  EXPECT_EQ(RunCli("finetune " + cfg + " --override baseline=speedaug", root / "ft.txt"), 1);
  const std::string ft = ReadTextFile(root / "ft.txt");
  EXPECT_NE(ft.find("finetune failed"), std::string::npos) << ft;
  EXPECT_NE(ft.find("missing prerequisite"), std::string::npos) << ft;
  EXPECT_EQ(RunCli("pretrain " + cfg + " --override pretrain.bogus=1", root / "bad.txt"), 1);
  EXPECT_NE(ReadTextFile(root / "bad.txt").find("unknown key"), std::string::npos);
  EXPECT_NE(RunCli("no-such-command", root / "none.txt"), 0);
}

}  // namespace
}  // namespace speedlab
