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

#ifndef SPEEDLAB_EVAL_GOAL_H_
#define SPEEDLAB_EVAL_GOAL_H_

#include <optional>
#include <span>
#include <string>

#include "speedlab/eval/metric_log.h"

namespace speedlab {

struct Goal {
  double target_success = 0.95;
  double speedup = 1.5;  // over the pre-trained No-Accel execution time

  void Validate() const;
};

struct GoalHit {
  long iteration = 0;
  long env_steps = 0;
  long failed_episodes = 0;
};

bool MeetsGoal(const EvalReport& report, const Goal& goal, double baseline_exec_time);

// First logged evaluation meeting the goal, checked point-in-time.
std::optional<GoalHit> StepsToGoal(std::span<const MetricRow> rows, const Goal& goal,
                                   double baseline_exec_time);

// "0.95,x1.5" style goal strings.
Goal ParseGoal(const std::string& s);
std::string ToString(const Goal& goal);

}  // namespace speedlab

#endif  // SPEEDLAB_EVAL_GOAL_H_
