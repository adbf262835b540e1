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

#include "speedlab/eval/goal.h"

#include <cstdio>
#include <cstdlib>

#include "speedlab/core/error.h"

namespace speedlab {

void Goal::Validate() const {
  if (target_success < 0.0 || target_success > 1.0) {
    throw Error("goal: target_success must be in [0, 1]");
  }
  if (!(speedup >= 1.0)) throw Error("goal: speedup must be >= 1");
}

bool MeetsGoal(const EvalReport& report, const Goal& goal, double baseline_exec_time) {
  if (report.success_rate < goal.target_success) return false;
  if (!report.mean_exec_time.has_value()) return goal.target_success <= 0.0 && goal.speedup == 1.0;
  return *report.mean_exec_time <= baseline_exec_time / goal.speedup;
}

std::optional<GoalHit> StepsToGoal(std::span<const MetricRow> rows, const Goal& goal,
                                   double baseline_exec_time) {
  goal.Validate();
  for (const MetricRow& row : rows) {
    if (!row.eval.has_value()) continue;
    if (MeetsGoal(*row.eval, goal, baseline_exec_time)) {
      return GoalHit{row.iteration, row.env_steps, row.failed_episodes};
    }
  }
  return std::nullopt;
}

Goal ParseGoal(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error("goal: expected 'success,xSPEEDUP': " + s);
  std::string rhs = s.substr(comma + 1);
  if (!rhs.empty() && (rhs[0] == 'x' || rhs[0] == 'X')) rhs.erase(0, 1);
  Goal g;
  char* end = nullptr;
  g.target_success = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + comma) throw Error("goal: bad success value in " + s);
  g.speedup = std::strtod(rhs.c_str(), &end);
  if (rhs.empty() || *end != '\0') throw Error("goal: bad speedup in " + s);
  g.Validate();
  return g;
}

std::string ToString(const Goal& goal) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g,x%g", goal.target_success, goal.speedup);
  return buf;
}

}  // namespace speedlab
