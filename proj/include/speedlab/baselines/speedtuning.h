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

#ifndef SPEEDLAB_BASELINES_SPEEDTUNING_H_
#define SPEEDLAB_BASELINES_SPEEDTUNING_H_

#include <deque>
#include <memory>
#include <vector>

#include "speedlab/baselines/categorical.h"
#include "speedlab/nn/adam.h"
#include "speedlab/nn/mlp.h"
#include "speedlab/rl/finetune.h"

namespace speedlab {

struct SpeedTuningConfig {
  std::vector<double> speed_choices = {1.0, 2.0, 3.0, 4.0};
  int q_bins = 100;
  int backup_steps = 1;  // k of the k-step backup, in decisions
  double v_min = 0.0;
  double v_max = 1.0;
  double lr_start = 3e-4;
  double lr_end = 3e-5;
  int batch_size = 256;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_fraction = 0.2;  // of the env-step budget
  int target_update_period = 200;  // gradient steps
  std::vector<int> widths = {256, 256};
  double gamma = 0.99;
  int episodes_per_iter = 20;
  int updates_per_iter = 50;
  int replay_capacity = 100000;
  int exec_horizon = 8;

  void Validate() const;
  double Epsilon(long env_steps, long budget) const;
};

// State -> per-choice categorical return distributions.
class DistributionalQ {
 public:
  DistributionalQ() = default;
  DistributionalQ(int obs_dim, int num_choices, const CategoricalSupport& support,
                  const std::vector<int>& widths, RngStream& rng);

  int num_choices() const { return num_choices_; }
  const CategoricalSupport& support() const { return support_; }
  nn::MlpNet& net() { return net_; }
  const nn::MlpNet& net() const { return net_; }

  // Probabilities of choice a for every column: num_atoms x B per choice.
  std::vector<Matrix> Probs(const Matrix& obs) const;
  Matrix ExpectedValues(const Matrix& obs) const;  // num_choices x B
  std::vector<int> Greedy(const Matrix& obs) const;

 private:
  nn::MlpNet net_;
  int num_choices_ = 0;
  CategoricalSupport support_;
};

struct ReplayItem {
  Vector obs;
  int choice = 0;
  double reward = 0.0;    // discounted reward over the backup window
  double discount = 0.0;  // discount applied to the bootstrap distribution
  Vector next_obs;
  bool terminal = false;
};

// One cross-entropy step of the online network toward projected targets
// built from the target network's greedy distribution. Returns the loss.
double DistributionalUpdate(DistributionalQ& online, const DistributionalQ& target,
                            const std::vector<const ReplayItem*>& batch, nn::Adam& adam,
                            double lr);

// Builds k-step replay items from one episode of decisions.
std::vector<ReplayItem> BuildReplayItems(const std::vector<Vector>& obs,
                                         const std::vector<int>& choices,
                                         const std::vector<double>& rewards,
                                         const std::vector<int>& lengths,
                                         const Vector& final_obs, bool terminal,
                                         double gamma, int backup_steps);

// Picks a speed per query (epsilon-greedy on expected value) and executes the
// accelerated prefix of the frozen base policy's chunk.
class SpeedSelectorSampler : public PolicySampler {
 public:
  SpeedSelectorSampler(const DiffusionPolicy& base, const DistributionalQ& q,
                       const SpeedTuningConfig& config, double epsilon, double min_std);

  int chunk_length() const override { return config_.exec_horizon; }
  // Records (observation and choice) are always returned.
  PolicyOutput Sample(std::span<const PolicyQuery> queries, RngStream& rng,
                      bool record) override;

 private:
  const DiffusionPolicy& base_;
  const DistributionalQ& q_;
  const SpeedTuningConfig& config_;
  double epsilon_;
  double min_std_;
};

struct SpeedTuningResult {
  std::vector<MetricRow> rows;
  DistributionalQ q;
};

// Trains the speed selector with the base policy frozen. Throws if the base
// parameters change during training.
SpeedTuningResult SpeedTune(const DiffusionPolicy& base, const EnvConfig& env,
                            const SpeedTuningConfig& config,
                            const FinetuneOptions& options, std::uint64_t seed);

}  // namespace speedlab

#endif  // SPEEDLAB_BASELINES_SPEEDTUNING_H_
