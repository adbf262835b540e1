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

#ifndef SPEEDLAB_RL_GAE_H_
#define SPEEDLAB_RL_GAE_H_

#include <vector>

#include "speedlab/rl/transition.h"

namespace speedlab {

// Throws unless transitions are grouped by episode, decisions ascend and
// denoising levels descend inside each decision.
void CheckOrdering(const std::vector<AugmentedTransition>& batch);

// A_i = delta_i + discount_i * lambda * A_{i+1}, cut at episode ends, and
// return_target = A_i + V_i. Advantages are left unnormalized.
void ComputeGae(std::vector<AugmentedTransition>& batch, double lambda);

void NormalizeAdvantages(std::vector<AugmentedTransition>& batch);

}  // namespace speedlab

#endif  // SPEEDLAB_RL_GAE_H_
