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

#ifndef SPEEDLAB_CLI_COMMANDS_H_
#define SPEEDLAB_CLI_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "speedlab/cli/run_config.h"

namespace speedlab {

// Layout: <output_dir>/demos/seed_<s>/ holds the shared demonstrations and
// <output_dir>/<run>/seed_<s>/ one run (config.json, pretrain/, finetune/,
// eval/, analyze/). The run name is the baseline name.
std::filesystem::path DemoDir(const RunConfig& config, std::uint64_t seed);
std::filesystem::path RunDir(const RunConfig& config, const std::string& run,
                             std::uint64_t seed);

void CmdGenDemos(const RunConfig& config, std::optional<int> count,
                 std::optional<double> speed_fraction, std::ostream& out);
void CmdPretrain(const RunConfig& config, std::ostream& out);
void CmdFinetune(const RunConfig& config, std::ostream& out);
void CmdEval(const RunConfig& config, std::ostream& out);
void CmdAnalyze(const RunConfig& config, std::ostream& out);
// Plots the given logs, or every fine-tune log under output_dir when empty.
void CmdPlot(const RunConfig& config, const std::vector<std::filesystem::path>& logs,
             std::ostream& out);
// v_max sweep of speedaug runs sharing demonstrations and pre-train seeds.
void CmdSweep(const RunConfig& config, std::ostream& out);

// Per-stage helpers, also used by the sweep.
void PretrainRun(const RunConfig& config, const std::string& run, std::uint64_t seed,
                 std::ostream& out);
void FinetuneRun(const RunConfig& config, const std::string& run, std::uint64_t seed,
                 std::ostream& out);

}  // namespace speedlab

#endif  // SPEEDLAB_CLI_COMMANDS_H_
