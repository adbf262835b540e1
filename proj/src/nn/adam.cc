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

#include "speedlab/nn/adam.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace speedlab::nn {

Adam::Adam(int num_params, AdamOptions options)
    : options_(options), m_(Vector::Zero(num_params)), v_(Vector::Zero(num_params)) {}

void Adam::Step(Vector& params, Vector grad, double lr) {
  if (options_.max_grad_norm > 0.0) {
    const double norm = grad.norm();
    if (norm > options_.max_grad_norm) grad *= options_.max_grad_norm / norm;
  }
  ++steps_;
  m_ = options_.beta1 * m_ + (1.0 - options_.beta1) * grad;
  v_ = options_.beta2 * v_ + (1.0 - options_.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(steps_));
  if (options_.weight_decay > 0.0) params *= 1.0 - lr * options_.weight_decay;
  params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + options_.eps);
}

double CosineLr(double lr_start, double lr_end, long step, long total) {
  if (total <= 1) return lr_start;
  const double frac = std::clamp(static_cast<double>(step) / (total - 1), 0.0, 1.0);
  return lr_end + 0.5 * (lr_start - lr_end) * (1.0 + std::cos(std::numbers::pi * frac));
}

}  // namespace speedlab::nn
