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

#ifndef SPEEDLAB_PARL_PARL_LOOP_H_
#define SPEEDLAB_PARL_PARL_LOOP_H_

#include "speedlab/parl/distill.h"
#include "speedlab/parl/pi_opt.h"
#include "speedlab/rl/finetune.h"

namespace speedlab {

// Online loop: collect with pi^opt, fit the critics on the replay buffer and
// distill the selected chains into the fine-tuned denoising steps.
FinetuneResult ParlFinetune(const DiffusionPolicy& pretrained, const EnvConfig& env,
                            const ParlConfig& config, const FinetuneOptions& options,
                            std::uint64_t seed);

}  // namespace speedlab

#endif  // SPEEDLAB_PARL_PARL_LOOP_H_
