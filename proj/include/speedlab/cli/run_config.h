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

#ifndef SPEEDLAB_CLI_RUN_CONFIG_H_
#define SPEEDLAB_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speedlab/baselines/run_baseline.h"
#include "speedlab/eval/goal.h"
#include "speedlab/parl/pi_opt.h"

namespace speedlab {

enum class Algorithm { kDppo, kParl };

std::string ToString(Algorithm a);
Algorithm ParseAlgorithm(const std::string& s);

struct DemoSettings {
  int count = 200;
  ExpertOptions expert;
};

struct FinetuneSettings {
  Algorithm algorithm = Algorithm::kDppo;
  long budget_env_steps = 200000;
  int eval_every = 2;
  bool stop_at_goal = false;
  DppoConfig dppo;
  ParlConfig parl;
  SpeedTuningConfig speedtuning;
  double accel_demo_v = 3.0;
  double accel_policy_v = 2.0;
  int long_horizon = 32;
};

struct EvalSettings {
  int n_episodes = 400;
  std::uint64_t seed = kDefaultEvalSeed;
  double min_std = 0.0;
  std::vector<Goal> goals = {Goal{0.95, 1.5}};
};

struct AnalyzeSettings {
  int n_samples = 100;
  int steps = 12;
  double object_x = EnvGeometry::kLiftObjectX;
};

struct RunConfig {
  std::string output_dir = "runs";
  std::vector<std::uint64_t> seeds = {1};
  std::string baseline = "speedaug";
  EnvConfig env;
  DemoSettings demos;
  PolicyConfig policy;
  AugmentConfig augment{AugmentMode::kUniform, 3.0, 3.0, Interp::kStandard, Pad::kHoldLast};
  FinetuneSettings finetune;
  EvalSettings eval;
  AnalyzeSettings analyze;
  std::vector<double> sweep_v_max = {2.0, 3.0, 4.0};

  void Validate() const;
  BaselineSettings ToBaselineSettings() const;
};

nlohmann::json ToJson(const RunConfig& config);
// Missing keys take their defaults; unknown keys are rejected.
RunConfig RunConfigFromJson(const nlohmann::json& j);

RunConfig LoadRunConfig(const std::filesystem::path& path);

// Applies "a.b.c=value" to the JSON form. The value is parsed as JSON when
// possible and taken as a string otherwise.
void ApplyOverride(nlohmann::json& j, const std::string& assignment);

}  // namespace speedlab

#endif  // SPEEDLAB_CLI_RUN_CONFIG_H_
