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

#ifndef SPEEDLAB_ENVS_POLICY_H_
#define SPEEDLAB_ENVS_POLICY_H_

#include <span>
#include <vector>

#include "speedlab/core/rng.h"
#include "speedlab/core/types.h"

namespace speedlab {

struct PolicyQuery {
  const State* state = nullptr;
  int env_index = 0;  // slot in the batched rollout
  int env_step = 0;   // steps already taken in the current episode
};

// Per-decision data kept for learning.
struct DecisionRecord {
  Vector obs;                // normalized observation the sampler conditioned on
  std::vector<Vector> chain;  // chain[j] = a^(K - j), normalized, flattened
  Vector rl_action;          // action as seen by the learner (normalized)
  int choice = -1;           // discrete choice, when the sampler makes one
};

struct PolicyOutput {
  std::vector<ActionChunk> execute;      // one per query, >= exec horizon actions
  std::vector<DecisionRecord> records;  // filled only when record = true
};

// Anything that maps a batch of states to action chunks.
class PolicySampler {
 public:
  virtual ~PolicySampler() = default;
  // Number of actions each returned chunk provides for execution.
  virtual int chunk_length() const = 0;
  virtual PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                              bool record) = 0;
};

}  // namespace speedlab

#endif  // SPEEDLAB_ENVS_POLICY_H_
