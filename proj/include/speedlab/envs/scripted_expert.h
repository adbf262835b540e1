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

#ifndef SPEEDLAB_ENVS_SCRIPTED_EXPERT_H_
#define SPEEDLAB_ENVS_SCRIPTED_EXPERT_H_

#include "speedlab/core/rng.h"
#include "speedlab/core/types.h"
#include "speedlab/envs/point_env.h"

namespace speedlab {

struct ExpertOptions {
  double speed_fraction = 0.4;  // fraction of max ee/grip speed, in (0, 1]
  double hover_height = 0.12;
  // Pause after the grip closes (and after it opens, for pick-place), in
  // steps at full speed; a slower demonstrator pauses proportionally longer.
  double settle_steps = 0.0;
};

// Waypoint controller: approach -> descend -> close -> settle -> lift
// (-> transport -> release for pick-place). The end effector and gripper
// targets advance at speed_fraction of the environment limits, so the
// executed motion tracks the targets exactly. Throws if the task is not
// completed within max_episode_steps.
Demonstration ScriptedExpert(const EnvConfig& config, const ExpertOptions& options,
                             RngStream& rng);
Demonstration ScriptedExpertFrom(const EnvConfig& config,
                                 const ExpertOptions& options, const State& start);

}  // namespace speedlab

#endif  // SPEEDLAB_ENVS_SCRIPTED_EXPERT_H_
