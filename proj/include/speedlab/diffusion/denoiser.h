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

#ifndef SPEEDLAB_DIFFUSION_DENOISER_H_
#define SPEEDLAB_DIFFUSION_DENOISER_H_

#include <span>
#include <vector>

#include "speedlab/core/rng.h"
#include "speedlab/core/types.h"
#include "speedlab/nn/linear.h"

namespace speedlab {

struct DenoiserConfig {
  int horizon = 16;
  int action_dim = 3;
  int obs_dim = 6;
  int width = 128;
  int depth = 2;             // residual blocks
  int step_embed_dim = 16;   // sinusoidal embedding size (also encoder output)
  int step_hidden = 64;      // step encoder hidden width

  int chunk_dim() const { return horizon * action_dim; }
  int cond_dim() const { return obs_dim + step_embed_dim; }
};

// Noise predictor eps(x_k, obs, k). The diffusion step goes through a
// sinusoidal embedding and a two-layer encoder; together with the
// observation it forms the conditioning vector. Each residual block is
//   h <- h + L2(silu((1 + scale) * L1(h) + shift)),
// with (scale, shift) from a per-block linear encoder of silu(cond).
class Denoiser {
 public:
  Denoiser() = default;
  explicit Denoiser(const DenoiserConfig& config);

  const DenoiserConfig& config() const { return config_; }
  int num_params() const { return num_params_; }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  void Init(RngStream& rng);

  struct Cache {
    Matrix step_in, step_pre, cond, x, h_final;
    std::vector<Matrix> h, u1, film, f;
  };

  // x: chunk_dim x B, obs: obs_dim x B, steps: B entries in [1, K].
  Matrix Forward(const Matrix& x, const Matrix& obs, std::span<const int> steps,
                 Cache* cache = nullptr) const;
  // Accumulates the parameter gradient for upstream d_out (chunk_dim x B).
  void Backward(const Cache& cache, const Matrix& d_out, Vector& grad) const;

 private:
  DenoiserConfig config_;
  nn::Linear step1_, step2_, input_, output_;
  std::vector<nn::Linear> cond_, lin1_, lin2_;
  int num_params_ = 0;
  Vector params_;
};

// sin/cos embedding of the step index, dim must be even.
Vector SinusoidalEmbedding(int step, int dim);

}  // namespace speedlab

#endif  // SPEEDLAB_DIFFUSION_DENOISER_H_
