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

#include "speedlab/rl/gae.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

void CheckOrdering(const std::vector<AugmentedTransition>& batch) {
  for (size_t i = 1; i < batch.size(); ++i) {
    const AugmentedTransition& a = batch[i - 1];
    const AugmentedTransition& b = batch[i];
    bool ok;
    if (a.episode_end) {
      ok = b.episode != a.episode;
    } else if (b.episode != a.episode) {
      ok = false;
    } else if (b.decision == a.decision) {
      ok = b.k < a.k;
    } else {
      ok = b.decision > a.decision;
    }
    if (!ok) throw Error("gae: unordered batch at transition " + std::to_string(i));
  }
  if (!batch.empty() && !batch.back().episode_end) {
    throw Error("gae: batch ends inside an episode");
  }
}

void ComputeGae(std::vector<AugmentedTransition>& batch, double lambda) {
  CheckOrdering(batch);
  double next_adv = 0.0;
  for (int i = static_cast<int>(batch.size()) - 1; i >= 0; --i) {
    AugmentedTransition& t = batch[i];
    double next_value;
    if (t.episode_end) {
      next_value = t.terminal ? 0.0 : t.bootstrap_value;
      next_adv = 0.0;
    } else {
      next_value = batch[i + 1].value;
    }
    const double delta = t.env_reward + t.discount * next_value - t.value;
    t.advantage = delta + t.discount * lambda * next_adv;
    t.return_target = t.advantage + t.value;
    next_adv = t.advantage;
  }
}

void NormalizeAdvantages(std::vector<AugmentedTransition>& batch) {
  if (batch.size() < 2) return;
  double mean = 0.0;
  for (const auto& t : batch) mean += t.advantage;
  mean /= batch.size();
  double var = 0.0;
  for (const auto& t : batch) var += (t.advantage - mean) * (t.advantage - mean);
  const double std = std::sqrt(var / (batch.size() - 1));
  for (auto& t : batch) t.advantage = (t.advantage - mean) / (std + 1e-8);
}

}  // namespace speedlab
