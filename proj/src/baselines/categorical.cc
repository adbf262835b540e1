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

#include "speedlab/baselines/categorical.h"

#include <algorithm>
#include <cmath>

#include "speedlab/core/error.h"

namespace speedlab {

void CategoricalSupport::Validate() const {
  if (num_atoms < 2) throw Error("categorical: need at least two atoms");
  if (!(v_max > v_min)) throw Error("categorical: v_max must exceed v_min");
}

Vector CategoricalSupport::atoms() const {
  Vector z(num_atoms);
  for (int i = 0; i < num_atoms; ++i) z[i] = atom(i);
  return z;
}

Vector ProjectDistribution(const CategoricalSupport& support, const Vector& probs,
                           double reward, double discount) {
  const int n = support.num_atoms;
  if (probs.size() != n) throw Error("categorical: distribution size mismatch");
  Vector out = Vector::Zero(n);
  const double delta = support.delta();
  for (int j = 0; j < n; ++j) {
    const double tz = std::clamp(reward + discount * support.atom(j), support.v_min,
                                 support.v_max);
    double b = (tz - support.v_min) / delta;
    const double nearest = std::round(b);
    if (std::abs(b - nearest) < 1e-9) b = nearest;
    const int lo = static_cast<int>(std::floor(b));
    const int hi = static_cast<int>(std::ceil(b));
    if (lo == hi) {
      out[lo] += probs[j];
    } else {
      out[lo] += probs[j] * (hi - b);
      out[hi] += probs[j] * (b - lo);
    }
  }
  return out;
}

double ExpectedValue(const CategoricalSupport& support, const Vector& probs) {
  return probs.dot(support.atoms());
}

Matrix Softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (int j = 0; j < logits.cols(); ++j) {
    const double m = logits.col(j).maxCoeff();
    out.col(j) = (logits.col(j).array() - m).exp().matrix();
    out.col(j) /= out.col(j).sum();
  }
  return out;
}

}  // namespace speedlab
