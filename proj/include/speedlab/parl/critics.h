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

#ifndef SPEEDLAB_PARL_CRITICS_H_
#define SPEEDLAB_PARL_CRITICS_H_

#include <vector>

#include "speedlab/nn/adam.h"
#include "speedlab/nn/mlp.h"

namespace speedlab {

// Q(s, flattened chunk), V(s) and a periodically copied target Q.
class CriticPair {
 public:
  CriticPair() = default;
  CriticPair(int obs_dim, int chunk_dim, const std::vector<int>& widths, RngStream& rng);

  Vector Q(const Matrix& obs, const Matrix& chunks) const;
  Vector QTarget(const Matrix& obs, const Matrix& chunks) const;
  Vector V(const Matrix& obs) const;
  // dQ/d chunk for every column.
  Matrix ActionGradient(const Matrix& obs, const Matrix& chunks) const;
  void SyncTarget() { q_target_ = q_; }

  nn::MlpNet& q() { return q_; }
  nn::MlpNet& v() { return v_; }
  const nn::MlpNet& q() const { return q_; }
  const nn::MlpNet& v() const { return v_; }
  const nn::MlpNet& q_target() const { return q_target_; }

 private:
  nn::MlpNet q_, v_, q_target_;
};

struct CriticTransition {
  Vector obs;
  Vector chunk;           // normalized executed chunk
  double reward = 0.0;    // discounted reward over the executed steps
  double discount = 0.0;  // gamma^(executed steps)
  Vector next_obs;
  bool terminal = false;
};

// r + discount * V(s') with the bootstrap dropped on terminal transitions.
Vector QTargets(const Vector& rewards, const Vector& discounts,
                const std::vector<char>& terminals, const Vector& v_next);

struct CriticTargets {
  Vector q;  // regression target of Q(s, a)
  Vector v;  // regression target of V(s): target-Q of the stored pair
};

CriticTargets ComputeCriticTargets(const CriticPair& critics,
                                   const std::vector<const CriticTransition*>& batch);

struct CriticLosses {
  double q_loss = 0.0;
  double v_loss = 0.0;
};

// One regression step on each of V and Q (squared error, batch mean).
CriticLosses CriticUpdate(CriticPair& critics,
                          const std::vector<const CriticTransition*>& batch,
                          nn::Adam& q_adam, nn::Adam& v_adam, double lr);

}  // namespace speedlab

#endif  // SPEEDLAB_PARL_CRITICS_H_
