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

#include "speedlab/diffusion/policy.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "speedlab/core/archive.h"
#include "speedlab/core/error.h"

namespace speedlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

void FixDegenerate(Vector& low, Vector& high) {
  for (int i = 0; i < low.size(); ++i) {
    if (high[i] - low[i] < 1e-6) {
      const double c = 0.5 * (high[i] + low[i]);
      low[i] = c - 1.0;
      high[i] = c + 1.0;
    }
  }
}

Matrix Randn(int rows, int cols, RngStream& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.Normal();
  }
  return m;
}

std::vector<double> ToStd(const Vector& v) { return {v.data(), v.data() + v.size()}; }
Vector FromStd(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Normalizer Normalizer::FromDataset(const Dataset& dataset) {
  dataset.Validate();
  Normalizer n;
  n.action_low = Vector::Constant(dataset.action_dim(), 1e300);
  n.action_high = Vector::Constant(dataset.action_dim(), -1e300);
  n.obs_low = Vector::Constant(dataset.obs_dim(), 1e300);
  n.obs_high = Vector::Constant(dataset.obs_dim(), -1e300);
  for (const Demonstration& d : dataset.demos) {
    n.action_low = n.action_low.cwiseMin(d.actions.cast<double>().rowwise().minCoeff());
    n.action_high = n.action_high.cwiseMax(d.actions.cast<double>().rowwise().maxCoeff());
    n.obs_low = n.obs_low.cwiseMin(d.states.cast<double>().rowwise().minCoeff());
    n.obs_high = n.obs_high.cwiseMax(d.states.cast<double>().rowwise().maxCoeff());
  }
  FixDegenerate(n.action_low, n.action_high);
  FixDegenerate(n.obs_low, n.obs_high);
  return n;
}

Matrix Normalizer::NormalizeObs(const Matrix& obs) const {
  const Vector scale = 2.0 * (obs_high - obs_low).cwiseInverse();
  return ((obs.colwise() - obs_low).array().colwise() * scale.array() - 1.0).matrix();
}

Matrix Normalizer::NormalizeActions(const Matrix& actions) const {
  const Vector scale = 2.0 * (action_high - action_low).cwiseInverse();
  return ((actions.colwise() - action_low).array().colwise() * scale.array() - 1.0).matrix();
}

Matrix Normalizer::NormalizeChunks(const Matrix& flat) const {
  const int a = static_cast<int>(action_low.size());
  Matrix out(flat.rows(), flat.cols());
  for (int j = 0; j < flat.cols(); ++j) {
    Eigen::Map<const Matrix> chunk(flat.col(j).data(), a, flat.rows() / a);
    Eigen::Map<Matrix>(out.col(j).data(), a, flat.rows() / a) = NormalizeActions(chunk);
  }
  return out;
}

Matrix Normalizer::UnnormalizeChunks(const Matrix& flat) const {
  const int a = static_cast<int>(action_low.size());
  const Vector half = 0.5 * (action_high - action_low);
  Matrix out(flat.rows(), flat.cols());
  for (int j = 0; j < flat.cols(); ++j) {
    Eigen::Map<const Matrix> chunk(flat.col(j).data(), a, flat.rows() / a);
    Eigen::Map<Matrix> dst(out.col(j).data(), a, flat.rows() / a);
    dst = ((chunk.array() + 1.0).colwise() * half.array()).matrix();
    dst.colwise() += action_low;
  }
  return out;
}

void PolicyConfig::Validate() const {
  if (horizon < 1) throw Error("policy: horizon must be >= 1");
  if (exec_horizon < 1 || exec_horizon > horizon) {
    throw Error("policy: exec_horizon must be in [1, horizon]");
  }
  if (num_denoising_steps < 1) throw Error("policy: num_denoising_steps must be >= 1");
  if (batch_size < 1) throw Error("policy: batch_size must be >= 1");
  if (train_steps < 0) throw Error("policy: train_steps must be >= 0");
}

DiffusionPolicy::DiffusionPolicy(const PolicyConfig& config, Normalizer normalizer,
                                 int obs_dim, int action_dim)
    : config_(config), normalizer_(std::move(normalizer)) {
  config_.Validate();
  schedule_ = MakeCosineSchedule(config.num_denoising_steps);
  DenoiserConfig dc;
  dc.horizon = config.horizon;
  dc.action_dim = action_dim;
  dc.obs_dim = obs_dim;
  dc.width = config.width;
  dc.depth = config.depth;
  net_ = Denoiser(dc);
}

void DiffusionPolicy::Save(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("checkpoint: cannot create " + dir.string());
  net_.params() = net_.params().cast<float>().cast<double>();
  json m;
  m["format_version"] = kCheckpointVersion;
  m["kind"] = "diffusion_policy";
  m["obs_dim"] = obs_dim();
  m["action_dim"] = action_dim();
  m["horizon"] = config_.horizon;
  m["exec_horizon"] = config_.exec_horizon;
  m["num_denoising_steps"] = config_.num_denoising_steps;
  m["width"] = config_.width;
  m["depth"] = config_.depth;
  m["num_params"] = net_.num_params();
  m["action_low"] = ToStd(normalizer_.action_low);
  m["action_high"] = ToStd(normalizer_.action_high);
  m["obs_low"] = ToStd(normalizer_.obs_low);
  m["obs_high"] = ToStd(normalizer_.obs_high);
  WriteFloat32File(dir / "params.bin",
                   std::span<const double>(net_.params().data(), net_.params().size()));
  WriteTextFile(dir / "manifest.json", m.dump(2) + "\n");
}

DiffusionPolicy DiffusionPolicy::Load(const fs::path& dir) {
  json m;
  try {
    m = json::parse(ReadTextFile(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error("checkpoint: bad manifest in " + dir.string() + ": " + e.what());
  }
  if (m.value("format_version", -1) != kCheckpointVersion ||
      m.value("kind", "") != "diffusion_policy") {
    throw Error("unsupported format version");
  }
  PolicyConfig c;
  c.horizon = m.at("horizon");
  c.exec_horizon = m.at("exec_horizon");
  c.num_denoising_steps = m.at("num_denoising_steps");
  c.width = m.at("width");
  c.depth = m.at("depth");
  Normalizer n;
  n.action_low = FromStd(m.at("action_low").get<std::vector<double>>());
  n.action_high = FromStd(m.at("action_high").get<std::vector<double>>());
  n.obs_low = FromStd(m.at("obs_low").get<std::vector<double>>());
  n.obs_high = FromStd(m.at("obs_high").get<std::vector<double>>());
  DiffusionPolicy p(c, std::move(n), m.at("obs_dim"), m.at("action_dim"));
  const std::vector<float> params = ReadFloat32File(dir / "params.bin");
  if (static_cast<int>(params.size()) != p.net_.num_params()) {
    throw Error("checkpoint: parameter count mismatch in " + dir.string());
  }
  p.net_.params() =
      Eigen::Map<const Eigen::VectorXf>(params.data(), params.size()).cast<double>();
  return p;
}

ChainSample SampleChunks(const Denoiser& base, const Denoiser* finetuned,
                         int finetune_steps, const NoiseSchedule& schedule,
                         const Matrix& obs_normalized, RngStream& rng, double min_std,
                         bool record) {
  const int batch = static_cast<int>(obs_normalized.cols());
  const int dim = base.config().chunk_dim();
  ChainSample out;
  Matrix x = Randn(dim, batch, rng);
  if (record) out.chain.push_back(x);
  std::vector<int> steps(batch);
  for (int k = schedule.num_steps; k >= 1; --k) {
    const Denoiser& net = (finetuned != nullptr && k <= finetune_steps) ? *finetuned : base;
    std::fill(steps.begin(), steps.end(), k);
    const Matrix eps_hat = net.Forward(x, obs_normalized, steps);
    x = PosteriorMean(schedule, k, x, eps_hat);
    const double std = StepStd(schedule, k, min_std);
    if (std > 0.0) x += std * Randn(dim, batch, rng);
    if (record) out.chain.push_back(x);
  }
  out.chunks = std::move(x);
  return out;
}

std::vector<ActionChunk> ToExecutable(const Normalizer& normalizer, const Matrix& chunks,
                                      int action_dim) {
  const Matrix actions = normalizer.UnnormalizeChunks(chunks.cwiseMax(-1.0).cwiseMin(1.0));
  std::vector<ActionChunk> out;
  out.reserve(actions.cols());
  for (int j = 0; j < actions.cols(); ++j) {
    out.push_back(ActionChunk::FromFlat(actions.col(j), action_dim));
  }
  return out;
}

SampledChunk SampleChunk(const DiffusionPolicy& policy, const State& state,
                         RngStream& rng, double min_std, bool record) {
  const Matrix obs = policy.normalizer().NormalizeObs(state.Observation());
  ChainSample cs = SampleChunks(policy.net(), nullptr, 0, policy.schedule(), obs, rng,
                                min_std, record);
  SampledChunk out;
  out.chunk = ToExecutable(policy.normalizer(), cs.chunks, policy.action_dim()).front();
  if (record) {
    std::vector<Vector> chain;
    for (const Matrix& level : cs.chain) chain.push_back(level.col(0));
    out.chain = std::move(chain);
  }
  return out;
}

Matrix StackObservations(std::span<const PolicyQuery> queries) {
  if (queries.empty()) return {};
  Matrix obs(queries.front().state->dim(), static_cast<int>(queries.size()));
  for (size_t i = 0; i < queries.size(); ++i) obs.col(i) = queries[i].state->Observation();
  return obs;
}

ChainSample DiffusionSampler::SampleNormalized(const Matrix& obs_normalized,
                                               RngStream& rng, bool record) const {
  return SampleChunks(policy_.net(), finetuned_, finetune_steps_, policy_.schedule(),
                      obs_normalized, rng, min_std_, record);
}

PolicyOutput DiffusionSampler::Sample(std::span<const PolicyQuery> queries,
                                      RngStream& rng, bool record) {
  PolicyOutput out;
  if (queries.empty()) return out;
  const Matrix obs = policy_.normalizer().NormalizeObs(StackObservations(queries));
  ChainSample cs = SampleNormalized(obs, rng, record);
  out.execute = ToExecutable(policy_.normalizer(), cs.chunks, policy_.action_dim());
  if (record) {
    for (int i = 0; i < obs.cols(); ++i) {
      DecisionRecord r;
      r.obs = obs.col(i);
      for (const Matrix& level : cs.chain) r.chain.push_back(level.col(i));
      r.rl_action = cs.chunks.col(i);
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace speedlab
