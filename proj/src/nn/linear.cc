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

#include "speedlab/nn/linear.h"

#include <cmath>

namespace speedlab::nn {

void Linear::Init(Vector& params, RngStream& rng) const {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
  for (int i = offset_; i < end(); ++i) params[i] = rng.Uniform(-bound, bound);
}

Matrix Linear::Forward(const Vector& params, const Matrix& x) const {
  Matrix y = weight(params) * x;
  y.colwise() += bias(params);
  return y;
}

Matrix Linear::Backward(const Vector& params, const Matrix& x, const Matrix& dy,
                        Vector& grad, bool need_dx) const {
  Eigen::Map<Matrix> dw(grad.data() + offset_, out_, in_);
  Eigen::Map<Vector> db(grad.data() + offset_ + out_ * in_, out_);
  dw.noalias() += dy * x.transpose();
  db += dy.rowwise().sum();
  if (!need_dx) return {};
  return weight(params).transpose() * dy;
}

Matrix Silu(const Matrix& x) {
  return (x.array() / (1.0 + (-x.array()).exp())).matrix();
}

Matrix SiluBackward(const Matrix& x, const Matrix& dy) {
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-x.array()).exp());
  return (dy.array() * s * (1.0 + x.array() * (1.0 - s))).matrix();
}

}  // namespace speedlab::nn
