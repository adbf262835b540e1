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

#ifndef SPEEDLAB_AUGMENT_ACCEL_H_
#define SPEEDLAB_AUGMENT_ACCEL_H_

#include <string>

#include "speedlab/core/rng.h"
#include "speedlab/core/types.h"

namespace speedlab {

enum class AugmentMode { kNone, kConstant, kUniform };

// How a fractional source index x is resolved.
//   kStandard: a[fl] + (x - fl) * (a[ce] - a[fl])
//   kDamped:   a[fl] + ((x - fl) / v) * (a[ce] - a[fl])
// kDamped shrinks the interpolation weight by 1/v, so for v > 1 it is not a
// convex combination of the neighbours. Kept for comparison runs only.
enum class Interp { kStandard, kDamped };

// Indices past the end of the source repeat the final action.
enum class Pad { kHoldLast };

struct AugmentConfig {
  AugmentMode mode = AugmentMode::kNone;
  double v = 3.0;      // constant mode
  double v_max = 3.0;  // uniform mode draws v ~ U(1, v_max)
  Interp interp = Interp::kStandard;
  Pad pad = Pad::kHoldLast;

  void Validate() const;
};

// Time-compressed chunk of `horizon` actions starting at `start`: element
// i (1-based) is the source at fractional index start + i * v - 1.
// source is A x L, column per action; the result is A x horizon.
Matrix Accel(const Eigen::Ref<const Matrix>& source, int start, double v,
             int horizon, Interp interp = Interp::kStandard,
             Pad pad = Pad::kHoldLast);

double SampleFactor(const AugmentConfig& config, RngStream& rng);

std::string ToString(AugmentMode mode);
AugmentMode ParseAugmentMode(const std::string& s);
std::string ToString(Interp interp);
Interp ParseInterp(const std::string& s);

}  // namespace speedlab

#endif  // SPEEDLAB_AUGMENT_ACCEL_H_
