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

#include "speedlab/eval/chunk_scatter.h"

#include <fstream>

#include "speedlab/core/error.h"

namespace speedlab {

std::vector<ScatterRow> ChunkScatter(PolicySampler& policy, const EnvConfig& config,
                                     const State& reset, int n_samples, int steps,
                                     int exec_horizon, RngStream& rng) {
  if (n_samples < 0 || steps < 1) throw Error("chunk_scatter: bad sample/step counts");
  std::vector<ScatterRow> rows;
  if (n_samples == 0) return rows;
  EnvConfig short_config = config;
  short_config.max_episode_steps = steps;
  const std::vector<State> starts(n_samples, reset);
  RolloutOptions ro;
  ro.exec_horizon = exec_horizon;
  const std::vector<EpisodeRecord> episodes =
      RolloutBatch(policy, short_config, starts, ro, rng);
  for (int s = 0; s < n_samples; ++s) {
    const EpisodeRecord& ep = episodes[s];
    bool grip_closed = false;
    for (int t = 0; t < ep.length; ++t) {
      const State& st = ep.states[t + 1];
      ScatterRow row;
      row.sample_id = s;
      row.step = t + 1;
      row.ee_x = st.proprio[0];
      row.ee_z = st.proprio[1];
      row.grip = ep.actions(2, t);
      row.is_last_step = t + 1 == ep.length;
      if (!grip_closed && row.grip > 0.5) {
        row.is_first_grip_close = true;
        grip_closed = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double FinalDisplacementVariance(const std::vector<ScatterRow>& rows, const State& reset) {
  std::vector<double> dx, dz;
  for (const ScatterRow& r : rows) {
    if (!r.is_last_step) continue;
    dx.push_back(r.ee_x - reset.proprio[0]);
    dz.push_back(r.ee_z - reset.proprio[1]);
  }
  if (dx.empty()) return 0.0;
  const double n = static_cast<double>(dx.size());
  double mx = 0.0, mz = 0.0;
  for (size_t i = 0; i < dx.size(); ++i) {
    mx += dx[i];
    mz += dz[i];
  }
  mx /= n;
  mz /= n;
  double var = 0.0;
  for (size_t i = 0; i < dx.size(); ++i) {
    var += (dx[i] - mx) * (dx[i] - mx) + (dz[i] - mz) * (dz[i] - mz);
  }
  return var / n;
}

void WriteScatter(const std::filesystem::path& path, const std::vector<ScatterRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("chunk_scatter: cannot open " + path.string());
  out << "sample_id\tstep\tee_x\tee_z\tgrip\tis_last_step\tis_first_grip_close\n";
  out.precision(17);
  for (const ScatterRow& r : rows) {
    out << r.sample_id << '\t' << r.step << '\t' << r.ee_x << '\t' << r.ee_z << '\t'
        << r.grip << '\t' << int(r.is_last_step) << '\t' << int(r.is_first_grip_close)
        << '\n';
  }
}

}  // namespace speedlab
