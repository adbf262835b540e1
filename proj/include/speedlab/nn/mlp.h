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

#ifndef SPEEDLAB_NN_MLP_H_
#define SPEEDLAB_NN_MLP_H_

#include <vector>

#include "speedlab/nn/linear.h"

namespace speedlab::nn {

// Feed-forward net: SiLU on hidden layers, linear output.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {in, hidden..., out}
  explicit Mlp(std::vector<int> sizes, int offset = 0);

  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each hidden layer
  };

  int num_params() const;
  int in() const { return sizes_.front(); }
  int out() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  void Init(Vector& params, RngStream& rng) const;
  Matrix Forward(const Vector& params, const Matrix& x, Cache* cache = nullptr) const;
  // Accumulates parameter gradient; returns dL/dx.
  Matrix Backward(const Vector& params, const Cache& cache, const Matrix& dy,
                  Vector& grad) const;

 private:
  std::vector<int> sizes_;
  std::vector<Linear> layers_;
};

// An Mlp together with its parameters.
struct MlpNet {
  Mlp arch;
  Vector params;

  MlpNet() = default;
  MlpNet(std::vector<int> sizes, RngStream& rng);
  Matrix Forward(const Matrix& x, Mlp::Cache* cache = nullptr) const {
    return arch.Forward(params, x, cache);
  }
};

}  // namespace speedlab::nn

#endif  // SPEEDLAB_NN_MLP_H_
