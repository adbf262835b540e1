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

#include "speedlab/envs/scripted_expert.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "speedlab/core/error.h"

namespace speedlab {

namespace {

struct Phase {
  enum Kind { kMove, kGrip, kWait } kind;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double grip_goal = 0.0;
  int wait = 0;
};

std::vector<Phase> PlanPhases(const EnvConfig& config, const ExpertOptions& options,
                              const State& start) {
  const double ox = start.object[0];
  const double oz = start.object[1];
  const int settle = static_cast<int>(std::ceil(options.settle_steps / options.speed_fraction));
  std::vector<Phase> phases;
  phases.push_back({Phase::kMove, {ox, oz + options.hover_height}});
  phases.push_back({Phase::kMove, {ox, oz}});
  phases.push_back({Phase::kGrip, {}, 1.0});
  phases.push_back({Phase::kWait, {}, 0.0, settle});
  if (config.env_id == EnvId::kPointLift) {
    // Aim past the threshold so success triggers mid-motion.
    phases.push_back({Phase::kMove, {ox, config.success_threshold + 0.1}});
  } else {
    phases.push_back({Phase::kMove, {ox, EnvGeometry::kCarryZ}});
    phases.push_back({Phase::kMove, {EnvGeometry::kBinX, EnvGeometry::kCarryZ}});
    phases.push_back({Phase::kWait, {}, 0.0, settle});
    phases.push_back({Phase::kGrip, {}, 0.0});
  }
  return phases;
}

}  // namespace

Demonstration ScriptedExpertFrom(const EnvConfig& config, const ExpertOptions& options,
                                 const State& start) {
  config.Validate();
  if (!(options.speed_fraction > 0.0 && options.speed_fraction <= 1.0)) {
    throw Error("scripted_expert: speed_fraction must be in (0, 1]");
  }
  const double ee_speed = options.speed_fraction * config.max_ee_speed;
  const double grip_speed = options.speed_fraction * config.max_grip_speed;
  const std::vector<Phase> phases = PlanPhases(config, options, start);

  Eigen::Vector2d cmd(start.proprio[0], start.proprio[1]);
  double grip_cmd = start.proprio[2];
  size_t phase = 0;
  int waited = 0;

  std::vector<Vector> states;
  std::vector<Vector> actions;
  State s = start;
  for (int t = 0; t < config.max_episode_steps; ++t) {
    // Skip phases that are already satisfied.
    while (phase < phases.size()) {
      const Phase& p = phases[phase];
      const bool complete =
          (p.kind == Phase::kMove && (p.goal - cmd).norm() < 1e-12) ||
          (p.kind == Phase::kGrip && std::abs(p.grip_goal - grip_cmd) < 1e-12) ||
          (p.kind == Phase::kWait && waited >= p.wait);
      if (!complete) break;
      ++phase;
      waited = 0;
    }
    if (phase < phases.size()) {
      const Phase& p = phases[phase];
      if (p.kind == Phase::kMove) {
        Eigen::Vector2d step = p.goal - cmd;
        if (step.norm() > ee_speed) step *= ee_speed / step.norm();
        cmd += step;
      } else if (p.kind == Phase::kGrip) {
        grip_cmd += std::clamp(p.grip_goal - grip_cmd, -grip_speed, grip_speed);
      } else {
        ++waited;
      }
    }
    Vector a(kActionDim);
    a << cmd.x(), cmd.y(), grip_cmd;
    states.push_back(s.Observation());
    actions.push_back(a);
    const StepResult r = Step(s, a, config);
    s = r.next_state;
    if (r.success) {
      Demonstration demo;
      const int n = static_cast<int>(actions.size());
      demo.states.resize(kObsDim, n);
      demo.actions.resize(kActionDim, n);
      for (int i = 0; i < n; ++i) {
        demo.states.col(i) = states[i].cast<float>();
        demo.actions.col(i) = actions[i].cast<float>();
      }
      demo.success = true;
      return demo;
    }
  }
  throw Error("scripted_expert: task not completed within max_episode_steps");
}

Demonstration ScriptedExpert(const EnvConfig& config, const ExpertOptions& options,
                             RngStream& rng) {
  return ScriptedExpertFrom(config, options, Reset(config, rng));
}

}  // namespace speedlab
