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

#include "speedlab/parl/critics.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

namespace {

std::vector<int> Sizes(int in, const std::vector<int>& widths) {
  std::vector<int> sizes = {in};
  sizes.insert(sizes.end(), widths.begin(), widths.end());
  sizes.push_back(1);
  return sizes;
}

Matrix Stack(const Matrix& obs, const Matrix& chunks) {
  Matrix x(obs.rows() + chunks.rows(), obs.cols());
  x << obs, chunks;
  return x;
}

double Regress(nn::MlpNet& net, const Matrix& x, const Vector& target, nn::Adam& adam,
               double lr) {
  nn::Mlp::Cache cache;
  const Matrix pred = net.Forward(x, &cache);
  const Matrix diff = pred - target.transpose();
  const double n = static_cast<double>(target.size());
  Vector grad = Vector::Zero(net.params.size());
  net.arch.Backward(net.params, cache, (2.0 / n) * diff, grad);
  if (!grad.allFinite()) throw DivergenceError("critic: non-finite gradient");
  adam.Step(net.params, std::move(grad), lr);
  return diff.squaredNorm() / n;
}

}  // namespace

CriticPair::CriticPair(int obs_dim, int chunk_dim, const std::vector<int>& widths,
                       RngStream& rng)
    : q_(Sizes(obs_dim + chunk_dim, widths), rng), v_(Sizes(obs_dim, widths), rng) {
  q_target_ = q_;
}

Vector CriticPair::Q(const Matrix& obs, const Matrix& chunks) const {
  return q_.Forward(Stack(obs, chunks)).row(0).transpose();
}

Vector CriticPair::QTarget(const Matrix& obs, const Matrix& chunks) const {
  return q_target_.Forward(Stack(obs, chunks)).row(0).transpose();
}

Vector CriticPair::V(const Matrix& obs) const {
  return v_.Forward(obs).row(0).transpose();
}

Matrix CriticPair::ActionGradient(const Matrix& obs, const Matrix& chunks) const {
  nn::Mlp::Cache cache;
  q_.Forward(Stack(obs, chunks), &cache);
  Vector scratch = Vector::Zero(q_.params.size());
  const Matrix dx =
      q_.arch.Backward(q_.params, cache, Matrix::Ones(1, obs.cols()), scratch);
  return dx.bottomRows(chunks.rows());
}

Vector QTargets(const Vector& rewards, const Vector& discounts,
                const std::vector<char>& terminals, const Vector& v_next) {
  Vector out(rewards.size());
  for (int i = 0; i < rewards.size(); ++i) {
    out[i] = rewards[i] + (terminals[i] ? 0.0 : discounts[i] * v_next[i]);
  }
  return out;
}

CriticTargets ComputeCriticTargets(const CriticPair& critics,
                                   const std::vector<const CriticTransition*>& batch) {
  const int b = static_cast<int>(batch.size());
  CriticTargets t;
  if (b == 0) return t;
  const int obs_dim = static_cast<int>(batch[0]->obs.size());
  Matrix obs(obs_dim, b), next(obs_dim, b), chunks(batch[0]->chunk.size(), b);
  Vector rewards(b), discounts(b);
  std::vector<char> terminals(b);
  for (int j = 0; j < b; ++j) {
    obs.col(j) = batch[j]->obs;
    chunks.col(j) = batch[j]->chunk;
    next.col(j) = batch[j]->terminal ? batch[j]->obs : batch[j]->next_obs;
    rewards[j] = batch[j]->reward;
    discounts[j] = batch[j]->discount;
    terminals[j] = batch[j]->terminal;
  }
  t.q = QTargets(rewards, discounts, terminals, critics.V(next));
  t.v = critics.QTarget(obs, chunks);
  return t;
}

CriticLosses CriticUpdate(CriticPair& critics,
                          const std::vector<const CriticTransition*>& batch,
                          nn::Adam& q_adam, nn::Adam& v_adam, double lr) {
  CriticLosses losses;
  const int b = static_cast<int>(batch.size());
  if (b == 0) return losses;
  const CriticTargets targets = ComputeCriticTargets(critics, batch);
  const int obs_dim = static_cast<int>(batch[0]->obs.size());
  Matrix obs(obs_dim, b), chunks(batch[0]->chunk.size(), b);
  for (int j = 0; j < b; ++j) {
    obs.col(j) = batch[j]->obs;
    chunks.col(j) = batch[j]->chunk;
  }
  losses.v_loss = Regress(critics.v(), obs, targets.v, v_adam, lr);
  losses.q_loss = Regress(critics.q(), Stack(obs, chunks), targets.q, q_adam, lr);
  if (!std::isfinite(losses.q_loss) || !std::isfinite(losses.v_loss)) {
    throw DivergenceError("critic: non-finite loss");
  }
  return losses;
}

}  // namespace speedlab
