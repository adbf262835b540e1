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

#include "speedlab/nn/mlp.h"

#include "speedlab/core/error.h"

namespace speedlab::nn {

Mlp::Mlp(std::vector<int> sizes, int offset) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw Error("mlp: need at least input and output sizes");
  for (size_t i = 0; i + 1 < sizes_.size(); ++i) {
    layers_.emplace_back(sizes_[i], sizes_[i + 1], offset);
    offset = layers_.back().end();
  }
}

int Mlp::num_params() const {
  int n = 0;
  for (const Linear& l : layers_) n += l.num_params();
  return n;
}

void Mlp::Init(Vector& params, RngStream& rng) const {
  for (const Linear& l : layers_) l.Init(params, rng);
}

Matrix Mlp::Forward(const Vector& params, const Matrix& x, Cache* cache) const {
  if (cache != nullptr) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix h = x;
  for (size_t i = 0; i < layers_.size(); ++i) {
    if (cache != nullptr) cache->inputs.push_back(h);
    Matrix z = layers_[i].Forward(params, h);
    if (i + 1 == layers_.size()) return z;
    h = Silu(z);
    if (cache != nullptr) cache->pre.push_back(std::move(z));
  }
  return h;
}

Matrix Mlp::Backward(const Vector& params, const Cache& cache, const Matrix& dy,
                     Vector& grad) const {
  Matrix d = dy;
  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    d = layers_[i].Backward(params, cache.inputs[i], d, grad);
    if (i > 0) d = SiluBackward(cache.pre[i - 1], d);
  }
  return d;
}

MlpNet::MlpNet(std::vector<int> sizes, RngStream& rng) : arch(std::move(sizes)) {
  params = Vector::Zero(arch.num_params());
  arch.Init(params, rng);
}

}  // namespace speedlab::nn
