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

// Command-line front end: gen-demos, pretrain, finetune, eval, analyze, plot
// and sweep over one JSON run configuration.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speedlab/cli/commands.h"
#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"

namespace {

struct Common {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config_path, "JSON run configuration");
  cmd->add_option("--seed", common.seeds, "Seed(s); replaces the configured seed list");
  cmd->add_option("--override", common.overrides, "key=value override (dotted keys)");
}

speedlab::RunConfig Resolve(const Common& common) {
  nlohmann::json j = nlohmann::json::object();
  if (!common.config_path.empty()) {
    try {
      j = nlohmann::json::parse(speedlab::ReadTextFile(common.config_path));
    } catch (const nlohmann::json::exception& e) {
      throw speedlab::Error("cannot parse " + common.config_path + ": " + e.what());
    }
  }
  for (const std::string& o : common.overrides) speedlab::ApplyOverride(j, o);
  if (!common.seeds.empty()) j["seeds"] = common.seeds;
  return speedlab::RunConfigFromJson(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speedlab: tempo-augmented diffusion policy experiments"};
  app.require_subcommand(1);

  Common common;
  std::optional<int> count;
  std::optional<double> speed_fraction;
  std::vector<std::string> logs;

  auto* gen = app.add_subcommand("gen-demos", "Generate scripted demonstrations");
  AddCommon(gen, common);
  gen->add_option("--count", count, "Number of demonstrations");
  gen->add_option("--speed-fraction", speed_fraction, "Expert speed as a fraction of the limits");
  auto* pretrain = app.add_subcommand("pretrain", "Pre-train the diffusion policy");
  AddCommon(pretrain, common);
  auto* finetune = app.add_subcommand("finetune", "Fine-tune with the configured RL method");
  AddCommon(finetune, common);
  auto* eval = app.add_subcommand("eval", "Evaluate the latest checkpoint");
  AddCommon(eval, common);
  auto* analyze = app.add_subcommand("analyze", "Chunk-scatter and tempo statistics");
  AddCommon(analyze, common);
  auto* plot = app.add_subcommand("plot", "Plot metric logs");
  AddCommon(plot, common);
  plot->add_option("--log", logs, "Metric log(s); default: all logs under output_dir");
  auto* sweep = app.add_subcommand("sweep", "v_max sweep of speedaug runs");
  AddCommon(sweep, common);

  CLI11_PARSE(app, argc, argv);

  std::string stage = "config";
  try {
    const speedlab::RunConfig config = Resolve(common);
    if (gen->parsed()) {
      stage = "gen-demos";
      speedlab::CmdGenDemos(config, count, speed_fraction, std::cout);
    } else if (pretrain->parsed()) {
      stage = "pretrain";
      speedlab::CmdPretrain(config, std::cout);
    } else if (finetune->parsed()) {
      stage = "finetune";
      speedlab::CmdFinetune(config, std::cout);
    } else if (eval->parsed()) {
      stage = "eval";
      speedlab::CmdEval(config, std::cout);
    } else if (analyze->parsed()) {
      stage = "analyze";
      speedlab::CmdAnalyze(config, std::cout);
    } else if (plot->parsed()) {
      stage = "plot";
      std::vector<std::filesystem::path> paths(logs.begin(), logs.end());
      speedlab::CmdPlot(config, paths, std::cout);
    } else if (sweep->parsed()) {
      stage = "sweep";
      speedlab::CmdSweep(config, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "speedlab: " << stage << " failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
