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

#include "speedlab/diffusion/denoiser.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

Vector SinusoidalEmbedding(int step, int dim) {
  const int half = dim / 2;
  Vector e(dim);
  const double scale = std::log(10000.0) / std::max(half - 1, 1);
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-scale * i);
    e[i] = std::sin(step * freq);
    e[half + i] = std::cos(step * freq);
  }
  return e;
}

Denoiser::Denoiser(const DenoiserConfig& c) : config_(c) {
  if (c.horizon < 1 || c.action_dim < 1 || c.obs_dim < 1 || c.width < 1 || c.depth < 0) {
    throw Error("denoiser: invalid architecture");
  }
  if (c.step_embed_dim % 2 != 0) throw Error("denoiser: step_embed_dim must be even");
  int offset = 0;
  auto add = [&offset](int in, int out) {
    nn::Linear l(in, out, offset);
    offset = l.end();
    return l;
  };
  step1_ = add(c.step_embed_dim, c.step_hidden);
  step2_ = add(c.step_hidden, c.step_embed_dim);
  input_ = add(c.chunk_dim(), c.width);
  for (int b = 0; b < c.depth; ++b) {
    cond_.push_back(add(c.cond_dim(), 2 * c.width));
    lin1_.push_back(add(c.width, c.width));
    lin2_.push_back(add(c.width, c.width));
  }
  output_ = add(c.width, c.chunk_dim());
  num_params_ = offset;
  params_ = Vector::Zero(num_params_);
}

void Denoiser::Init(RngStream& rng) {
  step1_.Init(params_, rng);
  step2_.Init(params_, rng);
  input_.Init(params_, rng);
  for (int b = 0; b < config_.depth; ++b) {
    cond_[b].Init(params_, rng);
    lin1_[b].Init(params_, rng);
    lin2_[b].Init(params_, rng);
  }
  output_.Init(params_, rng);
}

Matrix Denoiser::Forward(const Matrix& x, const Matrix& obs, std::span<const int> steps,
                         Cache* cache) const {
  const int batch = static_cast<int>(x.cols());
  if (x.rows() != config_.chunk_dim() || obs.rows() != config_.obs_dim ||
      obs.cols() != batch || static_cast<int>(steps.size()) != batch) {
    throw Error("denoiser: input shape mismatch");
  }
  Matrix step_in(config_.step_embed_dim, batch);
  for (int i = 0; i < batch; ++i) step_in.col(i) = SinusoidalEmbedding(steps[i], config_.step_embed_dim);
  Matrix step_pre = step1_.Forward(params_, step_in);
  Matrix step_emb = step2_.Forward(params_, nn::Silu(step_pre));
  Matrix cond(config_.cond_dim(), batch);
  cond << obs, step_emb;
  const Matrix cond_act = nn::Silu(cond);

  Matrix h = input_.Forward(params_, x);
  const int w = config_.width;
  if (cache != nullptr) {
    cache->h.clear();
    cache->u1.clear();
    cache->film.clear();
    cache->f.clear();
  }
  for (int b = 0; b < config_.depth; ++b) {
    Matrix film = cond_[b].Forward(params_, cond_act);
    Matrix u1 = lin1_[b].Forward(params_, h);
    Matrix f = ((1.0 + film.topRows(w).array()) * u1.array() + film.bottomRows(w).array()).matrix();
    Matrix u2 = lin2_[b].Forward(params_, nn::Silu(f));
    if (cache != nullptr) {
      cache->h.push_back(h);
      cache->u1.push_back(std::move(u1));
      cache->film.push_back(std::move(film));
      cache->f.push_back(std::move(f));
    }
    h += u2;
  }
  Matrix out = output_.Forward(params_, nn::Silu(h));
  if (cache != nullptr) {
    cache->step_in = std::move(step_in);
    cache->step_pre = std::move(step_pre);
    cache->cond = std::move(cond);
    cache->x = x;
    cache->h_final = std::move(h);
  }
  return out;
}

void Denoiser::Backward(const Cache& cache, const Matrix& d_out, Vector& grad) const {
  if (grad.size() != num_params_) throw Error("denoiser: gradient size mismatch");
  const int w = config_.width;
  const Matrix cond_act = nn::Silu(cache.cond);
  Matrix dh = output_.Backward(params_, nn::Silu(cache.h_final), d_out, grad);
  dh = nn::SiluBackward(cache.h_final, dh);
  Matrix d_cond_act = Matrix::Zero(cache.cond.rows(), cache.cond.cols());
  for (int b = config_.depth - 1; b >= 0; --b) {
    const Matrix& f = cache.f[b];
    const Matrix& u1 = cache.u1[b];
    const Matrix& film = cache.film[b];
    Matrix df = lin2_[b].Backward(params_, nn::Silu(f), dh, grad);
    df = nn::SiluBackward(f, df);
    Matrix d_film(2 * w, df.cols());
    d_film.topRows(w) = (df.array() * u1.array()).matrix();
    d_film.bottomRows(w) = df;
    const Matrix du1 = (df.array() * (1.0 + film.topRows(w).array())).matrix();
    d_cond_act += cond_[b].Backward(params_, cond_act, d_film, grad);
    dh += lin1_[b].Backward(params_, cache.h[b], du1, grad);
  }
  input_.Backward(params_, cache.x, dh, grad, /*need_dx=*/false);
  const Matrix d_cond = nn::SiluBackward(cache.cond, d_cond_act);
  const Matrix d_step_emb = d_cond.bottomRows(config_.step_embed_dim);
  Matrix d_step = step2_.Backward(params_, nn::Silu(cache.step_pre), d_step_emb, grad);
  d_step = nn::SiluBackward(cache.step_pre, d_step);
  step1_.Backward(params_, cache.step_in, d_step, grad, /*need_dx=*/false);
}

}  // namespace speedlab
