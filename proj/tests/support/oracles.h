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

#ifndef SPEEDLAB_TESTS_SUPPORT_ORACLES_H_
#define SPEEDLAB_TESTS_SUPPORT_ORACLES_H_

#include <string>
#include <vector>

namespace speedlab::oracle {

// Outcome of one oracle comparison. `detail` carries the measured quantity
// next to its bound.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool AllPass(const std::vector<Check>& checks);

// Acceleration operator: identity, integer copies, interpolation fixtures
// and 1000 randomized endpoint/monotonicity cases.
std::vector<Check> AugmentationSuite();

// Cosine schedule, forward noising, reverse-step log-density and a
// finite-difference gradient check of the denoising loss.
std::vector<Check> DdpmSuite();

// GAE against the n-step mixture, PPO clip fixtures, frozen denoising prefix
// after 100 updates, reward placement and behavior log-density recomputation.
std::vector<Check> DppoSuite();

// Distributional backup against tabular value iteration, projection mass,
// frozen SpeedTuning base, pi^opt selection properties and critic targets.
std::vector<Check> BaselineParlSuite();

}  // namespace speedlab::oracle

#endif  // SPEEDLAB_TESTS_SUPPORT_ORACLES_H_
