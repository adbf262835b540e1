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

#ifndef SPEEDLAB_DIFFUSION_POLICY_H_
#define SPEEDLAB_DIFFUSION_POLICY_H_

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "speedlab/core/types.h"
#include "speedlab/diffusion/denoiser.h"
#include "speedlab/diffusion/schedule.h"
#include "speedlab/envs/policy.h"

namespace speedlab {

// Per-dimension affine map of [low, high] onto [-1, 1].
struct Normalizer {
  Vector action_low, action_high;
  Vector obs_low, obs_high;

  static Normalizer FromDataset(const Dataset& dataset);

  Matrix NormalizeObs(const Matrix& obs) const;
  // Chunks are flattened A x H (time-major); the map is applied per action.
  Matrix NormalizeChunks(const Matrix& flat) const;
  Matrix UnnormalizeChunks(const Matrix& flat) const;
  Matrix NormalizeActions(const Matrix& actions) const;  // A x N
};

struct PolicyConfig {
  int horizon = 16;
  int exec_horizon = 8;
  int num_denoising_steps = 20;
  int width = 128;
  int depth = 2;
  double lr_start = 1e-4;
  double lr_end = 1e-5;
  int batch_size = 256;
  double weight_decay = 1e-6;
  int train_steps = 4000;
  double ema_decay = 0.0;  // 0 disables weight averaging
  int log_every = 100;

  void Validate() const;
};

class DiffusionPolicy {
 public:
  DiffusionPolicy() = default;
  DiffusionPolicy(const PolicyConfig& config, Normalizer normalizer, int obs_dim,
                  int action_dim);

  const PolicyConfig& config() const { return config_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  Denoiser& net() { return net_; }
  const Denoiser& net() const { return net_; }
  int obs_dim() const { return net_.config().obs_dim; }
  int action_dim() const { return net_.config().action_dim; }
  int horizon() const { return net_.config().horizon; }

  // Manifest (architecture, schedule length, normalization) + float32
  // parameters. Parameters are narrowed to float32 in memory as well, so a
  // saved policy and its reload behave identically.
  void Save(const std::filesystem::path& dir);
  static DiffusionPolicy Load(const std::filesystem::path& dir);

 private:
  PolicyConfig config_;
  Normalizer normalizer_;
  NoiseSchedule schedule_;
  Denoiser net_;
};

struct ChainSample {
  Matrix chunks;              // a^(0), normalized, chunk_dim x B
  std::vector<Matrix> chain;  // chain[j] = a^(K - j), only when recorded
};

// Batched reverse process. Steps k > finetune_steps use `base`; steps
// k <= finetune_steps use `finetuned` when it is given. The per-step
// standard deviation is StepStd(schedule, k, min_std).
ChainSample SampleChunks(const Denoiser& base, const Denoiser* finetuned,
                         int finetune_steps, const NoiseSchedule& schedule,
                         const Matrix& obs_normalized, RngStream& rng, double min_std,
                         bool record);

struct SampledChunk {
  ActionChunk chunk;                 // unnormalized, executable
  std::optional<std::vector<Vector>> chain;  // a^(K) .. a^(0), normalized
};

// Single-state convenience wrapper over SampleChunks.
SampledChunk SampleChunk(const DiffusionPolicy& policy, const State& state,
                         RngStream& rng, double min_std, bool record);

// Normalized chunk (chunk_dim x B) -> executable actions, clipped to the
// normalized box first.
std::vector<ActionChunk> ToExecutable(const Normalizer& normalizer, const Matrix& chunks,
                                      int action_dim);

// Adapts a diffusion policy (optionally with a fine-tuned suffix net) to the
// rollout interface.
class DiffusionSampler : public PolicySampler {
 public:
  DiffusionSampler(const DiffusionPolicy& policy, const Denoiser* finetuned,
                   int finetune_steps, double min_std)
      : policy_(policy), finetuned_(finetuned), finetune_steps_(finetune_steps),
        min_std_(min_std) {}

  int chunk_length() const override { return policy_.horizon(); }
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

  // Raw batched sampling shared by the wrappers built on top of this class.
  ChainSample SampleNormalized(const Matrix& obs_normalized, RngStream& rng,
                               bool record) const;
  const DiffusionPolicy& policy() const { return policy_; }

 private:
  const DiffusionPolicy& policy_;
  const Denoiser* finetuned_;
  int finetune_steps_;
  double min_std_;
};

Matrix StackObservations(std::span<const PolicyQuery> queries);

}  // namespace speedlab

#endif  // SPEEDLAB_DIFFUSION_POLICY_H_
