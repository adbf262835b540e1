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

#include "speedlab/eval/evaluate.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

std::vector<double> SuccessfulLengths(std::span<const EpisodeRecord> episodes) {
  std::vector<double> lengths;
  for (const EpisodeRecord& ep : episodes) {
    if (ep.success) lengths.push_back(ep.length);
  }
  return lengths;
}

EvalReport Summarize(std::span<const EpisodeRecord> episodes) {
  EvalReport report;
  report.n_episodes = static_cast<int>(episodes.size());
  const std::vector<double> lengths = SuccessfulLengths(episodes);
  report.successes = static_cast<int>(lengths.size());
  if (report.n_episodes > 0) {
    report.success_rate = static_cast<double>(report.successes) / report.n_episodes;
  }
  if (!lengths.empty()) {
    double mean = 0.0;
    for (double l : lengths) mean += l;
    mean /= lengths.size();
    double var = 0.0;
    for (double l : lengths) var += (l - mean) * (l - mean);
    report.mean_exec_time = mean;
    report.exec_time_std = std::sqrt(var / lengths.size());
  }
  return report;
}

EvalReport Evaluate(PolicySampler& policy, const EnvConfig& config,
                    const EvalOptions& options) {
  if (options.n_episodes < 1) throw Error("evaluate: n_episodes must be >= 1");
  RngStream reset_rng(options.eval_seed, Stream::kEval);
  RngStream policy_rng = reset_rng.Fork(1);
  const std::vector<State> resets = SampleResets(config, options.n_episodes, reset_rng);
  RolloutOptions ro;
  ro.exec_horizon = options.exec_horizon;
  const std::vector<EpisodeRecord> episodes =
      RolloutBatch(policy, config, resets, ro, policy_rng);
  return Summarize(episodes);
}

}  // namespace speedlab
