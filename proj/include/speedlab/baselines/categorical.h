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

#ifndef SPEEDLAB_BASELINES_CATEGORICAL_H_
#define SPEEDLAB_BASELINES_CATEGORICAL_H_

#include "speedlab/core/types.h"

namespace speedlab {

// Fixed, evenly spaced return support for a categorical value distribution.
struct CategoricalSupport {
  double v_min = 0.0;
  double v_max = 1.0;
  int num_atoms = 100;

  void Validate() const;
  double delta() const { return (v_max - v_min) / (num_atoms - 1); }
  double atom(int i) const { return v_min + i * delta(); }
  Vector atoms() const;
};

// Distribution of reward + discount * Z, with Z ~ probs on the support,
// projected back onto the support by linear interpolation between the two
// neighbouring atoms. Targets outside the support are clamped to its ends.
Vector ProjectDistribution(const CategoricalSupport& support, const Vector& probs,
                           double reward, double discount);

double ExpectedValue(const CategoricalSupport& support, const Vector& probs);

// Column-wise softmax.
Matrix Softmax(const Matrix& logits);

}  // namespace speedlab

#endif  // SPEEDLAB_BASELINES_CATEGORICAL_H_
