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

#ifndef SPEEDLAB_EVAL_CHUNK_SCATTER_H_
#define SPEEDLAB_EVAL_CHUNK_SCATTER_H_

#include <filesystem>
#include <vector>

#include "speedlab/envs/rollout.h"

namespace speedlab {

struct ScatterRow {
  int sample_id = 0;
  int step = 0;  // 1-based index of the executed action
  double ee_x = 0.0;
  double ee_z = 0.0;
  double grip = 0.0;
  bool is_last_step = false;
  bool is_first_grip_close = false;
};

// Repeatedly executes `steps` actions from the same reset state and records
// the end-effector trajectory of every sample.
std::vector<ScatterRow> ChunkScatter(PolicySampler& policy, const EnvConfig& config,
                                     const State& reset, int n_samples, int steps,
                                     int exec_horizon, RngStream& rng);

// Trace of the covariance of the final-step end-effector displacement.
double FinalDisplacementVariance(const std::vector<ScatterRow>& rows, const State& reset);

void WriteScatter(const std::filesystem::path& path, const std::vector<ScatterRow>& rows);

}  // namespace speedlab

#endif  // SPEEDLAB_EVAL_CHUNK_SCATTER_H_
