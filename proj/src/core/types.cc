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

#include "speedlab/core/types.h"

#include <string>

#include "speedlab/core/error.h"

namespace speedlab {

Vector State::Observation() const {
  Vector obs(dim());
  obs << proprio, object;
  return obs;
}

bool State::IsFinite() const { return proprio.allFinite() && object.allFinite(); }

ActionChunk ActionChunk::FromFlat(const Vector& flat, int action_dim) {
  if (action_dim <= 0 || flat.size() % action_dim != 0) {
    throw Error("chunk: flat size not divisible by action dim");
  }
  return ActionChunk(Eigen::Map<const Matrix>(flat.data(), action_dim,
                                              flat.size() / action_dim));
}

void Demonstration::Validate() const {
  if (actions.cols() < 1) throw Error("demonstration: empty");
  if (states.cols() != actions.cols()) {
    throw Error("demonstration: states/actions length mismatch");
  }
  if (!success) throw Error("demonstration: stored demos must be successful");
}

int Dataset::obs_dim() const {
  return demos.empty() ? 0 : static_cast<int>(demos.front().states.rows());
}

int Dataset::action_dim() const {
  return demos.empty() ? 0 : static_cast<int>(demos.front().actions.rows());
}

void Dataset::Validate() const {
  if (demos.empty()) throw Error("empty dataset");
  for (size_t i = 0; i < demos.size(); ++i) {
    const Demonstration& d = demos[i];
    d.Validate();
    if (d.states.rows() != obs_dim() || d.actions.rows() != action_dim()) {
      throw Error("dataset: dimension mismatch at demo " + std::to_string(i));
    }
  }
}

}  // namespace speedlab
