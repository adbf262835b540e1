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

#ifndef SPEEDLAB_ENVS_POINT_ENV_H_
#define SPEEDLAB_ENVS_POINT_ENV_H_

#include <string>

#include "speedlab/core/rng.h"
#include "speedlab/core/types.h"

namespace speedlab {

// Two-dimensional (x, z) point-gripper manipulation tasks with position-target
// actions. Observation layout (kObsDim = 6):
//   proprio = (ee_x, ee_z, grip)      grip in [0, 1], 1 = closed
//   object  = (obj_x, obj_z, held)    held in {0, 1}
// Action layout (kActionDim = 3): (target_x, target_z, grip_target).
enum class EnvId { kPointLift, kPointPickPlace };

inline constexpr int kObsDim = 6;
inline constexpr int kActionDim = 3;

struct EnvConfig {
  EnvId env_id = EnvId::kPointLift;
  int max_episode_steps = 100;
  double max_ee_speed = 0.05;    // workspace units per step
  double max_grip_speed = 0.25;  // closure units per step
  double grasp_radius = 0.04;
  // point_lift: object height to reach; point_pickplace: bin half-width.
  double success_threshold = 0.2;
  double reset_noise = 0.1;  // half-width of the object x randomization

  void Validate() const;
  static EnvConfig Defaults(EnvId id);
};

// Fixed task geometry.
struct EnvGeometry {
  static constexpr double kHomeX = 0.0;
  static constexpr double kHomeZ = 0.3;
  static constexpr double kLiftObjectX = 0.5;
  static constexpr double kPlaceObjectX = 0.3;
  static constexpr double kBinX = -0.4;
  static constexpr double kCarryZ = 0.15;
  static constexpr double kBindThreshold = 0.9;     // grip closure that binds
  static constexpr double kReleaseThreshold = 0.5;  // below this a held object drops
  static constexpr double kWorkspaceMinX = -1.0;
  static constexpr double kWorkspaceMaxX = 1.0;
  static constexpr double kWorkspaceMinZ = 0.0;
  static constexpr double kWorkspaceMaxZ = 1.0;
};

struct StepResult {
  State next_state;
  double reward = 0.0;  // 1 iff the task completes on this step
  bool done = false;
  bool success = false;
};

// End effector at home, gripper open, object x drawn from
// nominal +- reset_noise.
State Reset(const EnvConfig& config, RngStream& rng);
State ResetWithObjectX(const EnvConfig& config, double object_x);

// Deterministic transition. The end effector moves toward the target with
// displacement clipped to max_ee_speed; grip closure moves toward its target
// at max_grip_speed. An object binds only on the step the grip closure
// crosses kBindThreshold while the end effector is within grasp_radius.
// Throws on non-finite or wrongly sized actions.
StepResult Step(const State& state, const Eigen::Ref<const Vector>& action,
                const EnvConfig& config);

bool IsSuccess(const State& state, const EnvConfig& config);

std::string ToString(EnvId id);
EnvId ParseEnvId(const std::string& s);

}  // namespace speedlab

#endif  // SPEEDLAB_ENVS_POINT_ENV_H_
