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

#include "speedlab/envs/point_env.h"

#include <algorithm>
#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

void EnvConfig::Validate() const {
  if (max_episode_steps < 1) throw Error("env: max_episode_steps must be >= 1");
  if (!(max_ee_speed > 0.0)) throw Error("env: max_ee_speed must be > 0");
  if (!(max_grip_speed > 0.0)) throw Error("env: max_grip_speed must be > 0");
  if (!(grasp_radius > 0.0)) throw Error("env: grasp_radius must be > 0");
  if (!(success_threshold > 0.0)) throw Error("env: success_threshold must be > 0");
  if (reset_noise < 0.0) throw Error("env: reset_noise must be >= 0");
}

EnvConfig EnvConfig::Defaults(EnvId id) {
  EnvConfig c;
  c.env_id = id;
  if (id == EnvId::kPointPickPlace) {
    c.max_episode_steps = 160;
    c.success_threshold = 0.06;
  }
  return c;
}

namespace {

double NominalObjectX(const EnvConfig& config) {
  return config.env_id == EnvId::kPointLift ? EnvGeometry::kLiftObjectX
                                            : EnvGeometry::kPlaceObjectX;
}

}  // namespace

State ResetWithObjectX(const EnvConfig& config, double object_x) {
  State s;
  s.proprio = Vector(3);
  s.proprio << EnvGeometry::kHomeX, EnvGeometry::kHomeZ, 0.0;
  s.object = Vector(3);
  s.object << object_x, 0.0, 0.0;
  (void)config;
  return s;
}

State Reset(const EnvConfig& config, RngStream& rng) {
  const double nominal = NominalObjectX(config);
  double x = nominal;
  if (config.reset_noise > 0.0) {
    x = rng.Uniform(nominal - config.reset_noise, nominal + config.reset_noise);
  }
  return ResetWithObjectX(config, x);
}

bool IsSuccess(const State& s, const EnvConfig& config) {
  const bool held = s.object[2] > 0.5;
  if (config.env_id == EnvId::kPointLift) {
    return held && s.object[1] >= config.success_threshold;
  }
  return !held && s.object[1] <= 0.0 &&
         std::abs(s.object[0] - EnvGeometry::kBinX) <= config.success_threshold;
}

StepResult Step(const State& state, const Eigen::Ref<const Vector>& action,
                const EnvConfig& config) {
  if (action.size() != kActionDim) throw Error("env: action dimension mismatch");
  if (!action.allFinite()) throw Error("env: non-finite action");

  StepResult r;
  State& next = r.next_state;
  next = state;

  // End effector: first-order motion toward the target, speed-clipped.
  Eigen::Vector2d target(
      std::clamp(action[0], EnvGeometry::kWorkspaceMinX, EnvGeometry::kWorkspaceMaxX),
      std::clamp(action[1], EnvGeometry::kWorkspaceMinZ, EnvGeometry::kWorkspaceMaxZ));
  const Eigen::Vector2d ee(state.proprio[0], state.proprio[1]);
  Eigen::Vector2d delta = target - ee;
  const double dist = delta.norm();
  if (dist > config.max_ee_speed) delta *= config.max_ee_speed / dist;
  const Eigen::Vector2d ee_next = ee + delta;
  next.proprio[0] = ee_next.x();
  next.proprio[1] = ee_next.y();

  // Gripper closure, rate-limited.
  const double grip = state.proprio[2];
  const double grip_target = std::clamp(action[2], 0.0, 1.0);
  const double grip_next =
      grip + std::clamp(grip_target - grip, -config.max_grip_speed, config.max_grip_speed);
  next.proprio[2] = grip_next;

  // Object.
  const bool held = state.object[2] > 0.5;
  if (held) {
    if (grip_next >= EnvGeometry::kReleaseThreshold) {
      next.object[0] = ee_next.x();
      next.object[1] = ee_next.y();
    } else {
      next.object[0] = ee_next.x();
      next.object[1] = 0.0;  // dropped onto the table
      next.object[2] = 0.0;
    }
  } else {
    const bool crossed = grip < EnvGeometry::kBindThreshold &&
                         grip_next >= EnvGeometry::kBindThreshold;
    const Eigen::Vector2d obj(state.object[0], state.object[1]);
    if (crossed && (ee_next - obj).norm() <= config.grasp_radius) {
      next.object[0] = ee_next.x();
      next.object[1] = ee_next.y();
      next.object[2] = 1.0;
    }
  }

  r.success = IsSuccess(next, config);
  r.reward = r.success ? 1.0 : 0.0;
  r.done = r.success;
  return r;
}

std::string ToString(EnvId id) {
  return id == EnvId::kPointLift ? "point_lift" : "point_pickplace";
}

EnvId ParseEnvId(const std::string& s) {
  if (s == "point_lift") return EnvId::kPointLift;
  if (s == "point_pickplace") return EnvId::kPointPickPlace;
  throw Error("unknown env_id: " + s);
}

}  // namespace speedlab
