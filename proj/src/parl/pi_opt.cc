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

#include "speedlab/parl/pi_opt.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speedlab/core/error.h"

namespace speedlab {

void ParlConfig::Validate(int num_denoising_steps) const {
  if (n < 1 || k < 1 || k > n) throw Error("parl: need 1 <= k <= n");
  if (!(tau > 0.0)) throw Error("parl: tau must be positive");
  if (m < 0) throw Error("parl: m must be >= 0");
  if (finetune_steps < 1 || finetune_steps > num_denoising_steps) {
    throw Error("parl: finetune_steps must be in [1, K]");
  }
  if (critic_batch < 1 || distill_batch < 1 || episodes_per_iter < 1) {
    throw Error("parl: batch and episode counts must be >= 1");
  }
  if (target_period < 1) throw Error("parl: target_period must be >= 1");
}

Vector SoftmaxTau(const Vector& q, double tau) {
  const Vector z = (q.array() - q.maxCoeff()) / tau;
  Vector p = z.array().exp();
  return p / p.sum();
}

PiOptChoice SelectFromQ(const Vector& q, int k, double tau, RngStream& rng) {
  const int n = static_cast<int>(q.size());
  if (k < 1 || k > n) throw Error("pi_opt: need 1 <= k <= n");
  PiOptChoice c;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&q](int a, int b) { return q[a] > q[b]; });
  c.top.assign(order.begin(), order.begin() + k);
  Vector top_q(k);
  for (int i = 0; i < k; ++i) top_q[i] = q[c.top[i]];
  c.probs = SoftmaxTau(top_q, tau);
  const double u = rng.Uniform();
  double acc = 0.0;
  int pick = k - 1;
  for (int i = 0; i < k; ++i) {
    acc += c.probs[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  c.index = c.top[pick];
  return c;
}

Matrix GradientAscent(const CriticPair& critics, const Matrix& obs, Matrix chunks,
                      double alpha, int m) {
  for (int i = 0; i < m; ++i) chunks += alpha * critics.ActionGradient(obs, chunks);
  return chunks;
}

PolicyOutput PiOptSampler::Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                                  bool record) {
  PolicyOutput out;
  if (queries.empty()) return out;
  const int b = static_cast<int>(queries.size());
  const int n = config_.n;
  const int k = config_.k;
  const Matrix obs = base_.normalizer().NormalizeObs(StackObservations(queries));
  Matrix rep(obs.rows(), b * n);
  for (int i = 0; i < b; ++i) {
    for (int c = 0; c < n; ++c) rep.col(i * n + c) = obs.col(i);
  }
  const ChainSample cs = SampleChunks(base_.net(), actor_, config_.finetune_steps,
                                      base_.schedule(), rep, rng, min_std_, record);
  const Vector q = critics_.Q(rep, cs.chunks);
  Matrix chosen(cs.chunks.rows(), b);
  for (int i = 0; i < b; ++i) {
    const Vector qi = q.segment(i * n, n);
    const PiOptChoice pick_top = SelectFromQ(qi, k, config_.tau, rng);
    int idx = pick_top.index;
    Vector chunk = cs.chunks.col(i * n + idx);
    if (config_.local_opt && config_.m > 0) {
      Matrix cand(cs.chunks.rows(), k);
      Matrix cand_obs(obs.rows(), k);
      for (int t = 0; t < k; ++t) {
        cand.col(t) = cs.chunks.col(i * n + pick_top.top[t]);
        cand_obs.col(t) = obs.col(i);
      }
      cand = GradientAscent(critics_, cand_obs, cand, config_.alpha, config_.m);
      const PiOptChoice refined = SelectFromQ(critics_.Q(cand_obs, cand), k, config_.tau, rng);
      idx = pick_top.top[refined.index];
      chunk = cand.col(refined.index);
    }
    chosen.col(i) = chunk;
    if (record) {
      DecisionRecord r;
      r.obs = obs.col(i);
      for (const Matrix& level : cs.chain) r.chain.push_back(level.col(i * n + idx));
      r.rl_action = chunk;
      r.choice = idx;
      out.records.push_back(std::move(r));
    }
  }
  out.execute = ToExecutable(base_.normalizer(), chosen, base_.action_dim());
  return out;
}

}  // namespace speedlab
