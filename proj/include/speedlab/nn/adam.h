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

#ifndef SPEEDLAB_NN_ADAM_H_
#define SPEEDLAB_NN_ADAM_H_

#include "speedlab/core/types.h"

namespace speedlab::nn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled (AdamW)
  double max_grad_norm = 0.0;  // 0 disables clipping
};

class Adam {
 public:
  Adam() = default;
  Adam(int num_params, AdamOptions options);

  // grad is taken by value because clipping rescales it.
  void Step(Vector& params, Vector grad, double lr);
  long steps() const { return steps_; }

 private:
  AdamOptions options_;
  Vector m_;
  Vector v_;
  long steps_ = 0;
};

// Cosine decay from lr_start to lr_end over total steps.
double CosineLr(double lr_start, double lr_end, long step, long total);

}  // namespace speedlab::nn

#endif  // SPEEDLAB_NN_ADAM_H_
