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

#include "speedlab/cli/commands.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "speedlab/baselines/accel_policy.h"
#include "speedlab/cli/plot.h"
#include "speedlab/core/archive.h"
#include "speedlab/core/dataset.h"
#include "speedlab/core/error.h"
#include "speedlab/eval/chunk_scatter.h"
#include "speedlab/parl/parl_loop.h"

namespace speedlab {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path DemoDir(const RunConfig& config, std::uint64_t seed) {
  return fs::path(config.output_dir) / "demos" / ("seed_" + std::to_string(seed));
}

fs::path RunDir(const RunConfig& config, const std::string& run, std::uint64_t seed) {
  return fs::path(config.output_dir) / run / ("seed_" + std::to_string(seed));
}

namespace {

constexpr char kNoAccel[] = "no_accel";

void Require(const fs::path& path, const std::string& what, const std::string& hint) {
  if (!fs::exists(path)) {
    throw Error("missing prerequisite: " + what + " at " + path.string() + " (" + hint + ")");
  }
}

std::unique_ptr<PolicySampler> PretrainedSampler(BaselineName name,
                                                 const DiffusionPolicy& policy,
                                                 const BaselineSettings& settings,
                                                 double min_std) {
  auto inner = std::make_unique<DiffusionSampler>(policy, nullptr, 0, min_std);
  if (name == BaselineName::kAccelPolicy) {
    return std::make_unique<AccelPolicySampler>(std::move(inner), settings.accel_policy_v,
                                                settings.policy.exec_horizon);
  }
  return inner;
}

EvalOptions MakeEvalOptions(const RunConfig& config) {
  EvalOptions eo;
  eo.n_episodes = config.eval.n_episodes;
  eo.exec_horizon = config.policy.exec_horizon;
  eo.eval_seed = config.eval.seed;
  return eo;
}

void WriteJson(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  WriteTextFile(path, j.dump(2) + "\n");
}

json ReadJson(const fs::path& path) { return json::parse(ReadTextFile(path)); }

void SnapshotConfig(const RunConfig& config, const fs::path& run_dir) {
  WriteJson(run_dir / "config.json", ToJson(config));
}

double BaselineExecTime(const RunConfig& config, std::uint64_t seed) {
  const fs::path path = RunDir(config, kNoAccel, seed) / "pretrain" / "eval.json";
  Require(path, "no_accel pre-trained evaluation",
          "run pretrain with baseline=no_accel for this seed");
  const json j = ReadJson(path);
  if (j.at("mean_exec_time").is_null()) {
    throw Error("no_accel pre-trained policy never succeeds; no baseline execution time");
  }
  return j.at("mean_exec_time").get<double>();
}

}  // namespace

void CmdGenDemos(const RunConfig& config, std::optional<int> count,
                 std::optional<double> speed_fraction, std::ostream& out) {
  const int n = count.value_or(config.demos.count);
  if (n < 1) throw Error("gen-demos: count must be >= 1");
  ExpertOptions expert = config.demos.expert;
  if (speed_fraction) expert.speed_fraction = *speed_fraction;
  for (std::uint64_t seed : config.seeds) {
    const fs::path dir = DemoDir(config, seed);
    if (fs::exists(dir / "manifest.json")) {
      const Dataset existing = LoadDataset(dir);
      if (static_cast<int>(existing.demos.size()) == n) {
        out << "gen-demos: " << dir.string() << " up to date\n";
        continue;
      }
    }
    RngStream rng(seed, Stream::kDemos);
    Dataset ds;
    ds.env_id = ToString(config.env.env_id);
    for (int i = 0; i < n; ++i) ds.demos.push_back(ScriptedExpert(config.env, expert, rng));
    SaveDataset(ds, dir);
    out << "gen-demos: wrote " << n << " demos to " << dir.string() << "\n";
  }
}

void PretrainRun(const RunConfig& config, const std::string& run, std::uint64_t seed,
                 std::ostream& out) {
  const BaselineName name = ParseBaselineName(config.baseline);
  const BaselineSettings settings = config.ToBaselineSettings();
  const fs::path run_dir = RunDir(config, run, seed);
  const fs::path ckpt = run_dir / "pretrain";
  if (fs::exists(ckpt / "eval.json")) {
    out << "pretrain: " << ckpt.string() << " up to date\n";
    return;
  }
  Require(DemoDir(config, seed) / "manifest.json", "demonstrations", "run gen-demos");
  const Dataset ds = LoadDataset(DemoDir(config, seed));
  SnapshotConfig(config, run_dir);
  fs::create_directories(ckpt);
  std::ofstream loss_log(ckpt / "loss.tsv");
  loss_log << "step\tloss\tlr\n";
  PretrainResult pre =
      Pretrain(ds, PretrainAugment(name, settings), PretrainPolicyConfig(name, settings),
               seed, [&](int step, double loss, double lr) {
                 loss_log << step << '\t' << loss << '\t' << lr << '\n';
                 out << "pretrain[" << run << "/" << seed << "] step " << step << " loss "
                     << loss << "\n";
               });
  pre.policy.Save(ckpt);
  auto sampler = PretrainedSampler(name, pre.policy, settings, config.eval.min_std);
  const EvalReport report = Evaluate(*sampler, config.env, MakeEvalOptions(config));
  WriteJson(ckpt / "eval.json", ToJson(report));
  out << "pretrain[" << run << "/" << seed << "] success " << report.success_rate
      << " exec_time " << (report.mean_exec_time ? *report.mean_exec_time : -1.0) << "\n";
}

void CmdPretrain(const RunConfig& config, std::ostream& out) {
  for (std::uint64_t seed : config.seeds) PretrainRun(config, config.baseline, seed, out);
}

void FinetuneRun(const RunConfig& config, const std::string& run, std::uint64_t seed,
                 std::ostream& out) {
  const BaselineName name = ParseBaselineName(config.baseline);
  const BaselineSettings settings = config.ToBaselineSettings();
  const fs::path run_dir = RunDir(config, run, seed);
  const fs::path ft_dir = run_dir / "finetune";
  if (fs::exists(ft_dir / "summary.json")) {
    out << "finetune: " << ft_dir.string() << " up to date\n";
    return;
  }
  Require(run_dir / "pretrain" / "manifest.json", "pre-trained checkpoint", "run pretrain");
  const DiffusionPolicy pretrained = DiffusionPolicy::Load(run_dir / "pretrain");
  const double baseline_exec = BaselineExecTime(config, seed);
  fs::create_directories(ft_dir);
  SnapshotConfig(config, run_dir);

  MetricLogHeader header;
  header.method = run;
  header.env_id = ToString(config.env.env_id);
  header.seed = seed;
  header.baseline_exec_time = baseline_exec;
  header.extra["baseline"] = config.baseline;
  header.extra["algorithm"] = ToString(config.finetune.algorithm);
  MetricLogWriter writer(ft_dir / "metric_log.jsonl", header);

  FinetuneOptions options;
  options.budget_env_steps = config.finetune.budget_env_steps;
  options.eval_every = config.finetune.eval_every;
  options.eval = MakeEvalOptions(config);
  options.eval_min_std = config.eval.min_std;
  options.baseline_exec_time = baseline_exec;
  if (config.finetune.stop_at_goal && !config.eval.goals.empty()) {
    options.stop_goal = config.eval.goals.front();
  }
  options.checkpoint_dir = ft_dir / "checkpoints";
  options.log = &writer;
  options.on_row = [&](const MetricRow& row) {
    out << "finetune[" << run << "/" << seed << "] iter " << row.iteration << " steps "
        << row.env_steps << " fails " << row.failed_episodes;
    if (row.eval) {
      out << " success " << row.eval->success_rate << " exec_time "
          << (row.eval->mean_exec_time ? *row.eval->mean_exec_time : -1.0);
    }
    out << "\n";
  };

  std::vector<MetricRow> rows;
  if (config.finetune.algorithm == Algorithm::kParl) {
    if (name == BaselineName::kAccelPolicy || name == BaselineName::kSpeedTuning) {
      throw Error("finetune: parl is not available for baseline " + config.baseline);
    }
    ParlConfig pc = config.finetune.parl;
    pc.exec_horizon = config.policy.exec_horizon;
    rows = ParlFinetune(pretrained, config.env, pc, options, seed).rows;
  } else {
    rows = FinetuneBaseline(name, pretrained, settings, options, seed);
  }

  json summary;
  summary["baseline_exec_time"] = baseline_exec;
  summary["iterations"] = rows.empty() ? 0 : rows.back().iteration;
  summary["env_steps"] = rows.empty() ? 0 : rows.back().env_steps;
  summary["failed_episodes"] = rows.empty() ? 0 : rows.back().failed_episodes;
  json goals = json::object();
  for (const Goal& g : config.eval.goals) {
    const auto hit = StepsToGoal(rows, g, baseline_exec);
    goals[ToString(g)] = hit ? json{{"iteration", hit->iteration},
                                    {"env_steps", hit->env_steps},
                                    {"failed_episodes", hit->failed_episodes}}
                             : json(nullptr);
  }
  summary["steps_to_goal"] = goals;
  WriteJson(ft_dir / "summary.json", summary);
}

void CmdFinetune(const RunConfig& config, std::ostream& out) {
  for (std::uint64_t seed : config.seeds) FinetuneRun(config, config.baseline, seed, out);
}

void CmdEval(const RunConfig& config, std::ostream& out) {
  const BaselineName name = ParseBaselineName(config.baseline);
  const BaselineSettings settings = config.ToBaselineSettings();
  for (std::uint64_t seed : config.seeds) {
    const fs::path run_dir = RunDir(config, config.baseline, seed);
    const fs::path latest = run_dir / "finetune" / "checkpoints" / "latest";
    const fs::path selector = run_dir / "finetune" / "checkpoints" / "speed_selector.bin";
    EvalReport report;
    std::string source;
    if (name == BaselineName::kSpeedTuning && fs::exists(selector)) {
      const DiffusionPolicy policy = DiffusionPolicy::Load(run_dir / "pretrain");
      SpeedTuningConfig stc = settings.speedtuning;
      RngStream init_rng(seed, Stream::kInit);
      DistributionalQ q(policy.obs_dim(), static_cast<int>(stc.speed_choices.size()),
                        CategoricalSupport{stc.v_min, stc.v_max, stc.q_bins}, stc.widths,
                        init_rng);
      const std::vector<float> params = ReadFloat32File(selector);
      if (static_cast<long>(params.size()) != q.net().params.size()) {
        throw Error("eval: speed selector parameter count mismatch");
      }
      q.net().params =
          Eigen::Map<const Eigen::VectorXf>(params.data(), params.size()).cast<double>();
      SpeedSelectorSampler sampler(policy, q, stc, 0.0, config.eval.min_std);
      report = Evaluate(sampler, config.env, MakeEvalOptions(config));
      source = "finetuned";
    } else if (fs::exists(latest / "manifest.json")) {
      const FinetunedPolicy policy = FinetunedPolicy::Load(latest);
      const SamplerFactory factory =
          name == BaselineName::kAccelPolicy
              ? MakeAccelPolicyFactory(settings.accel_policy_v, config.policy.exec_horizon)
              : SamplerFactory(MakeDiffusionSampler);
      auto sampler =
          factory(policy.base, &policy.actor, policy.finetune_steps, config.eval.min_std);
      report = Evaluate(*sampler, config.env, MakeEvalOptions(config));
      source = "finetuned";
    } else {
      Require(run_dir / "pretrain" / "manifest.json", "checkpoint", "run pretrain");
      const DiffusionPolicy policy = DiffusionPolicy::Load(run_dir / "pretrain");
      auto sampler = PretrainedSampler(name, policy, settings, config.eval.min_std);
      report = Evaluate(*sampler, config.env, MakeEvalOptions(config));
      source = "pretrained";
    }
    json j = ToJson(report);
    j["checkpoint"] = source;
    WriteJson(run_dir / "eval" / "report.json", j);
    out << "eval[" << config.baseline << "/" << seed << "] " << source << " success "
        << report.success_rate << " exec_time "
        << (report.mean_exec_time ? *report.mean_exec_time : -1.0) << "\n";
  }
}

void CmdAnalyze(const RunConfig& config, std::ostream& out) {
  const BaselineName name = ParseBaselineName(config.baseline);
  const BaselineSettings settings = config.ToBaselineSettings();
  for (std::uint64_t seed : config.seeds) {
    const fs::path run_dir = RunDir(config, config.baseline, seed);
    Require(run_dir / "pretrain" / "manifest.json", "pre-trained checkpoint", "run pretrain");
    const DiffusionPolicy policy = DiffusionPolicy::Load(run_dir / "pretrain");
    auto sampler = PretrainedSampler(name, policy, settings, config.eval.min_std);
    const State reset = ResetWithObjectX(config.env, config.analyze.object_x);
    RngStream rng = RngStream(seed, Stream::kEval).Fork(2);
    const std::vector<ScatterRow> rows =
        ChunkScatter(*sampler, config.env, reset, config.analyze.n_samples,
                     config.analyze.steps, config.policy.exec_horizon, rng);
    fs::create_directories(run_dir / "analyze");
    WriteScatter(run_dir / "analyze" / "scatter.tsv", rows);

    RngStream reset_rng(config.eval.seed, Stream::kEval);
    RngStream policy_rng = reset_rng.Fork(1);
    const std::vector<State> starts =
        SampleResets(config.env, config.eval.n_episodes, reset_rng);
    RolloutOptions ro;
    ro.exec_horizon = config.policy.exec_horizon;
    const std::vector<EpisodeRecord> episodes =
        RolloutBatch(*sampler, config.env, starts, ro, policy_rng);
    const EvalReport report = Summarize(episodes);
    json summary;
    summary["final_displacement_variance"] = FinalDisplacementVariance(rows, reset);
    summary["exec_time_variance"] =
        report.exec_time_std ? (*report.exec_time_std) * (*report.exec_time_std) : 0.0;
    summary["eval"] = ToJson(report);
    WriteJson(run_dir / "analyze" / "summary.json", summary);
    out << "analyze[" << config.baseline << "/" << seed << "] displacement variance "
        << summary["final_displacement_variance"].get<double>() << " exec-time variance "
        << summary["exec_time_variance"].get<double>() << "\n";
  }
}

void CmdPlot(const RunConfig& config, const std::vector<fs::path>& logs, std::ostream& out) {
  std::vector<fs::path> inputs = logs;
  if (inputs.empty()) {
    const fs::path root(config.output_dir);
    if (fs::exists(root)) {
      for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.path().filename() == "metric_log.jsonl") inputs.push_back(entry.path());
      }
    }
    std::sort(inputs.begin(), inputs.end());
  }
  if (inputs.empty()) throw Error("missing prerequisite: no metric logs under " + config.output_dir);
  const fs::path out_dir = fs::path(config.output_dir) / "plots";
  for (const fs::path& p : PlotMetricLogs(inputs, out_dir)) {
    out << "plot: wrote " << p.string() << "\n";
  }
}

void CmdSweep(const RunConfig& config, std::ostream& out) {
  CmdGenDemos(config, std::nullopt, std::nullopt, out);
  RunConfig base = config;
  base.baseline = kNoAccel;
  for (std::uint64_t seed : config.seeds) PretrainRun(base, kNoAccel, seed, out);
  for (double v : config.sweep_v_max) {
    RunConfig c = config;
    c.baseline = "speedaug";
    c.augment.mode = AugmentMode::kUniform;
    c.augment.v_max = v;
    char name[64];
    std::snprintf(name, sizeof(name), "speedaug_vmax%g", v);
    for (std::uint64_t seed : config.seeds) {
      PretrainRun(c, name, seed, out);
      FinetuneRun(c, name, seed, out);
    }
  }
}

}  // namespace speedlab
