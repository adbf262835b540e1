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

#ifndef SPEEDLAB_DIFFUSION_SCHEDULE_H_
#define SPEEDLAB_DIFFUSION_SCHEDULE_H_

#include <vector>

#include "speedlab/core/types.h"

namespace speedlab {

// DDPM schedule for steps k = 1..K. Accessors take the 1-based step; index 0
// of alpha_bar is the clean-data boundary (alpha_bar(0) = 1).
struct NoiseSchedule {
  int num_steps = 0;
  std::vector<double> betas;       // beta_k, k = 1..K at [k - 1]
  std::vector<double> alphas;      // 1 - beta_k
  std::vector<double> alpha_bars;  // prod_{i <= k} alpha_i
  std::vector<double> beta_tildes;  // (1 - abar_{k-1}) / (1 - abar_k) * beta_k

  double beta(int k) const { return betas[k - 1]; }
  double alpha(int k) const { return alphas[k - 1]; }
  double alpha_bar(int k) const { return k == 0 ? 1.0 : alpha_bars[k - 1]; }
  double beta_tilde(int k) const { return beta_tildes[k - 1]; }

  void Validate() const;
};

// Squared-cosine profile f(t) = cos^2(((t / K) + s) / (1 + s) * pi / 2),
// betas from consecutive profile ratios clipped to max_beta, alpha_bar
// recomputed as the running product of the clipped alphas.
NoiseSchedule MakeCosineSchedule(int num_steps, double offset = 0.008,
                                 double max_beta = 0.999);

// sqrt(abar_k) * chunk + sqrt(1 - abar_k) * eps, column-wise.
Matrix ForwardNoise(const Matrix& chunk, int k, const Matrix& eps,
                    const NoiseSchedule& schedule);

// Reverse-step mean (1/sqrt(a_k)) (x_k - (1 - a_k) / sqrt(1 - abar_k) eps_hat).
Matrix PosteriorMean(const NoiseSchedule& schedule, int k, const Matrix& x_k,
                     const Matrix& eps_hat);
// d mean / d eps_hat (a scalar multiple of the identity).
double PosteriorMeanEpsCoefficient(const NoiseSchedule& schedule, int k);

// Reverse-step standard deviation with a floor: max(sqrt(beta_tilde_k), min_std).
double StepStd(const NoiseSchedule& schedule, int k, double min_std);

// log N(x | mean, std^2 I), summed over every entry.
double GaussianLogDensity(const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& mean, double std);

}  // namespace speedlab

#endif  // SPEEDLAB_DIFFUSION_SCHEDULE_H_
