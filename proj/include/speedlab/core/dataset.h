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

#ifndef SPEEDLAB_CORE_DATASET_H_
#define SPEEDLAB_CORE_DATASET_H_

#include <filesystem>

#include "speedlab/core/types.h"

namespace speedlab {

inline constexpr int kDatasetFormatVersion = 1;

// Directory layout:
//   manifest.json            env_id, dims, demo count, lengths, version
//   demo_<i>_states.bin      float32 LE, T x obs_dim row-major
//   demo_<i>_actions.bin     float32 LE, T x A row-major
void SaveDataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset LoadDataset(const std::filesystem::path& dir);

}  // namespace speedlab

#endif  // SPEEDLAB_CORE_DATASET_H_
