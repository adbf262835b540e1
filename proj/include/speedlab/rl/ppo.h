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

#ifndef SPEEDLAB_RL_PPO_H_
#define SPEEDLAB_RL_PPO_H_

#include <vector>

#include "speedlab/diffusion/policy.h"
#include "speedlab/nn/adam.h"
#include "speedlab/nn/mlp.h"
#include "speedlab/rl/transition.h"

namespace speedlab {

class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(int obs_dim, const std::vector<int>& widths, RngStream& rng);

  Vector Predict(const Matrix& obs) const;  // obs_dim x B -> B
  // One regression step on 0.5 (V - target)^2; returns the mean loss.
  double Fit(const Matrix& obs, const Vector& targets, nn::Adam& adam, double lr);
  const nn::MlpNet& net() const { return net_; }
  nn::MlpNet& net() { return net_; }

 private:
  nn::MlpNet net_;
};

// min(r A, clip(r, 1 - eps, 1 + eps) A)
double ClippedSurrogate(double ratio, double advantage, double eps);
// Whether the gradient flows through the ratio (the unclipped term is active).
bool SurrogateGradientActive(double ratio, double advantage, double eps);

// Log-density of a_km1 under the reverse-step Gaussian of the given network,
// reduced per the configuration (mean or sum over the chunk elements).
Vector TransitionLogProbs(const Denoiser& net, const NoiseSchedule& schedule,
                          const std::vector<const AugmentedTransition*>& batch,
                          const DppoConfig& config);

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  int epochs_run = 0;
  bool early_stopped = false;
};

struct PpoState {
  nn::Adam actor_adam;
  nn::Adam critic_adam;
};

PpoState MakePpoState(const Denoiser& actor, const ValueNet& value,
                      const DppoConfig& config);

// Clipped-surrogate ascent on the actor plus value regression. Transitions
// must already carry advantages and return targets.
PpoStats PpoUpdate(Denoiser& actor, ValueNet& value, PpoState& state,
                   const NoiseSchedule& schedule,
                   const std::vector<AugmentedTransition>& batch, const DppoConfig& config,
                   RngStream& rng);

}  // namespace speedlab

#endif  // SPEEDLAB_RL_PPO_H_
