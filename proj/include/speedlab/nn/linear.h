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

#ifndef SPEEDLAB_NN_LINEAR_H_
#define SPEEDLAB_NN_LINEAR_H_

#include "speedlab/core/rng.h"
#include "speedlab/core/types.h"

namespace speedlab::nn {

// Dense layer y = W x + b over a batch stored column-per-sample. Parameters
// live in a flat vector owned by the model; the layer only knows its offset.
// Layout at offset: W (out x in, column-major), then b (out).
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, int offset) : in_(in), out_(out), offset_(offset) {}

  int in() const { return in_; }
  int out() const { return out_; }
  int offset() const { return offset_; }
  int num_params() const { return out_ * in_ + out_; }
  int end() const { return offset_ + num_params(); }

  // PyTorch default: U(-1/sqrt(in), 1/sqrt(in)) for weights and bias.
  void Init(Vector& params, RngStream& rng) const;

  Matrix Forward(const Vector& params, const Matrix& x) const;

  // Accumulates dL/dW, dL/db into grad. Returns dL/dx unless need_dx is false.
  Matrix Backward(const Vector& params, const Matrix& x, const Matrix& dy,
                  Vector& grad, bool need_dx = true) const;

  Eigen::Map<const Matrix> weight(const Vector& params) const {
    return {params.data() + offset_, out_, in_};
  }
  Eigen::Map<const Vector> bias(const Vector& params) const {
    return {params.data() + offset_ + out_ * in_, out_};
  }

 private:
  int in_ = 0;
  int out_ = 0;
  int offset_ = 0;
};

// x * sigmoid(x)
Matrix Silu(const Matrix& x);
// dL/dx given pre-activation x and upstream dL/dy.
Matrix SiluBackward(const Matrix& x, const Matrix& dy);

}  // namespace speedlab::nn

#endif  // SPEEDLAB_NN_LINEAR_H_
