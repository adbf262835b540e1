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

#ifndef SPEEDLAB_PARL_PI_OPT_H_
#define SPEEDLAB_PARL_PI_OPT_H_

#include <vector>

#include "speedlab/diffusion/policy.h"
#include "speedlab/parl/critics.h"

namespace speedlab {

struct ParlConfig {
  int n = 5;  // candidates sampled from the policy
  int k = 5;  // top-k kept for the softmax draw
  bool local_opt = false;
  double alpha = 0.01;  // gradient-ascent step size
  int m = 3;            // gradient-ascent steps
  double tau = 0.02;
  double critic_lr = 3e-4;
  double policy_lr = 1e-5;
  int critic_batch = 256;
  int distill_batch = 256;
  double gamma = 0.99;
  std::vector<int> critic_widths = {256, 256};
  int target_period = 100;  // critic steps between target-Q copies
  int critic_updates_per_iter = 100;
  int distill_updates_per_iter = 20;
  int episodes_per_iter = 20;
  int replay_capacity = 100000;
  int distill_capacity = 5000;  // most recent selected chains kept for distillation
  int finetune_steps = 10;
  double min_std = 0.05;
  int exec_horizon = 8;

  void Validate(int num_denoising_steps) const;
};

// Softmax of q / tau (shift-invariant).
Vector SoftmaxTau(const Vector& q, double tau);

struct PiOptChoice {
  std::vector<int> top;  // candidate indices, best first, size k
  Vector probs;          // selection probabilities over `top`
  int index = 0;         // selected candidate
};

PiOptChoice SelectFromQ(const Vector& q, int k, double tau, RngStream& rng);

// m steps of chunk <- chunk + alpha * dQ/dchunk for every column.
Matrix GradientAscent(const CriticPair& critics, const Matrix& obs, Matrix chunks,
                      double alpha, int m);

// pi^opt: n policy samples, top-k by Q, optional local ascent, softmax-tau draw.
class PiOptSampler : public PolicySampler {
 public:
  PiOptSampler(const DiffusionPolicy& base, const Denoiser* actor, const CriticPair& critics,
               const ParlConfig& config, double min_std)
      : base_(base), actor_(actor), critics_(critics), config_(config), min_std_(min_std) {}

  int chunk_length() const override { return base_.horizon(); }
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

 private:
  const DiffusionPolicy& base_;
  const Denoiser* actor_;
  const CriticPair& critics_;
  const ParlConfig& config_;
  double min_std_;
};

}  // namespace speedlab

#endif  // SPEEDLAB_PARL_PI_OPT_H_
