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

#include "speedlab/diffusion/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "speedlab/core/error.h"

namespace speedlab {

void NoiseSchedule::Validate() const {
  if (num_steps < 1) throw Error("schedule: num_steps must be >= 1");
  for (int k = 1; k <= num_steps; ++k) {
    if (!(beta(k) > 0.0 && beta(k) < 1.0)) throw Error("schedule: beta out of (0, 1)");
    if (!(alpha_bar(k) < alpha_bar(k - 1))) {
      throw Error("schedule: alpha_bar not strictly decreasing");
    }
    if (!(beta_tilde(k) >= 0.0)) throw Error("schedule: negative beta_tilde");
  }
}

NoiseSchedule MakeCosineSchedule(int num_steps, double offset, double max_beta) {
  if (num_steps < 1) throw Error("schedule: num_steps must be >= 1");
  auto profile = [&](int t) {
    const double c = std::cos((static_cast<double>(t) / num_steps + offset) /
                              (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  NoiseSchedule s;
  s.num_steps = num_steps;
  double prod = 1.0;
  for (int k = 1; k <= num_steps; ++k) {
    const double beta = std::min(1.0 - profile(k) / profile(k - 1), max_beta);
    s.betas.push_back(beta);
    s.alphas.push_back(1.0 - beta);
    prod *= 1.0 - beta;
    s.alpha_bars.push_back(prod);
  }
  for (int k = 1; k <= num_steps; ++k) {
    s.beta_tildes.push_back((1.0 - s.alpha_bar(k - 1)) / (1.0 - s.alpha_bar(k)) *
                            s.beta(k));
  }
  s.Validate();
  return s;
}

Matrix ForwardNoise(const Matrix& chunk, int k, const Matrix& eps,
                    const NoiseSchedule& schedule) {
  if (k < 1 || k > schedule.num_steps) throw Error("forward_noise: step out of range");
  if (chunk.rows() != eps.rows() || chunk.cols() != eps.cols()) {
    throw Error("forward_noise: shape mismatch");
  }
  const double ab = schedule.alpha_bar(k);
  return std::sqrt(ab) * chunk + std::sqrt(1.0 - ab) * eps;
}

double PosteriorMeanEpsCoefficient(const NoiseSchedule& schedule, int k) {
  return -(1.0 - schedule.alpha(k)) /
         (std::sqrt(1.0 - schedule.alpha_bar(k)) * std::sqrt(schedule.alpha(k)));
}

Matrix PosteriorMean(const NoiseSchedule& schedule, int k, const Matrix& x_k,
                     const Matrix& eps_hat) {
  const double a = schedule.alpha(k);
  return (x_k - (1.0 - a) / std::sqrt(1.0 - schedule.alpha_bar(k)) * eps_hat) /
         std::sqrt(a);
}

double StepStd(const NoiseSchedule& schedule, int k, double min_std) {
  return std::max(std::sqrt(schedule.beta_tilde(k)), min_std);
}

double GaussianLogDensity(const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& mean, double std) {
  const double n = static_cast<double>(x.size());
  const double sq = (x - mean).squaredNorm();
  return -0.5 * sq / (std * std) - n * std::log(std) -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace speedlab
