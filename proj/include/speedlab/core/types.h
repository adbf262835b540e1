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

#ifndef SPEEDLAB_CORE_TYPES_H_
#define SPEEDLAB_CORE_TYPES_H_

#include <string>
#include <vector>

#include <Eigen/Core>

namespace speedlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Environment observation, split into robot proprioception and object pose.
// The concatenated order (proprio, object) is fixed per environment.
struct State {
  Vector proprio;
  Vector object;

  int dim() const { return static_cast<int>(proprio.size() + object.size()); }
  Vector Observation() const;
  bool IsFinite() const;
};

// H actions of dimension A. Stored column-per-action (A x H), so the
// column-major buffer is the time-major flattening used by the networks.
struct ActionChunk {
  Matrix actions;

  ActionChunk() = default;
  explicit ActionChunk(Matrix a) : actions(std::move(a)) {}

  int horizon() const { return static_cast<int>(actions.cols()); }
  int action_dim() const { return static_cast<int>(actions.rows()); }
  Eigen::Map<const Vector> Flat() const {
    return {actions.data(), actions.size()};
  }
  static ActionChunk FromFlat(const Vector& flat, int action_dim);
};

// One successful demonstration: T states and T actions, column per step.
// Stored as float32 so the on-disk format round-trips exactly.
struct Demonstration {
  Eigen::MatrixXf states;   // obs_dim x T
  Eigen::MatrixXf actions;  // A x T
  bool success = true;

  int length() const { return static_cast<int>(actions.cols()); }
  void Validate() const;
};

enum class ActionSpaceKind { kPositionTarget };

struct Dataset {
  std::vector<Demonstration> demos;
  std::string env_id;
  ActionSpaceKind action_space_kind = ActionSpaceKind::kPositionTarget;

  int obs_dim() const;
  int action_dim() const;
  // Throws on empty or heterogeneous datasets.
  void Validate() const;
};

}  // namespace speedlab

#endif  // SPEEDLAB_CORE_TYPES_H_
