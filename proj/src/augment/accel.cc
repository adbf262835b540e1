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

#include "speedlab/augment/accel.h"

#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

void AugmentConfig::Validate() const {
  if (v < 1.0) throw Error("augment: v must be >= 1");
  if (v_max < 1.0) throw Error("augment: v_max must be >= 1");
}

Matrix Accel(const Eigen::Ref<const Matrix>& source, int start, double v,
             int horizon, Interp interp, Pad /*pad*/) {
  if (source.cols() == 0) throw Error("accel: empty source");
  if (!(v >= 1.0)) throw Error("accel: v must be >= 1");
  if (horizon < 1) throw Error("accel: horizon must be >= 1");
  if (start < 0 || start >= source.cols()) throw Error("accel: start outside source");

  const int last = static_cast<int>(source.cols()) - 1;
  Matrix out(source.rows(), horizon);
  for (int i = 1; i <= horizon; ++i) {
    double x = start + i * v - 1.0;
    // Snap round-off so integer factors copy source elements exactly.
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-9) x = nearest;
    const double fl = std::floor(x);
    const int lo = std::min(static_cast<int>(fl), last);
    const int hi = std::min(static_cast<int>(std::ceil(x)), last);
    if (lo == hi) {
      out.col(i - 1) = source.col(lo);
      continue;
    }
    double w = x - fl;
    if (interp == Interp::kDamped) w /= v;
    out.col(i - 1) = source.col(lo) + w * (source.col(hi) - source.col(lo));
  }
  return out;
}

double SampleFactor(const AugmentConfig& config, RngStream& rng) {
  switch (config.mode) {
    case AugmentMode::kNone:
      return 1.0;
    case AugmentMode::kConstant:
      return config.v;
    case AugmentMode::kUniform:
      return rng.Uniform(1.0, config.v_max);
  }
  return 1.0;
}

std::string ToString(AugmentMode mode) {
  switch (mode) {
    case AugmentMode::kNone:
      return "none";
    case AugmentMode::kConstant:
      return "constant";
    case AugmentMode::kUniform:
      return "uniform";
  }
  return "none";
}

AugmentMode ParseAugmentMode(const std::string& s) {
  if (s == "none") return AugmentMode::kNone;
  if (s == "constant") return AugmentMode::kConstant;
  if (s == "uniform") return AugmentMode::kUniform;
  throw Error("unknown augment mode: " + s);
}

std::string ToString(Interp interp) {
  return interp == Interp::kDamped ? "damped" : "standard";
}

Interp ParseInterp(const std::string& s) {
  if (s == "standard") return Interp::kStandard;
  if (s == "damped") return Interp::kDamped;
  throw Error("unknown interpolation: " + s);
}

}  // namespace speedlab
