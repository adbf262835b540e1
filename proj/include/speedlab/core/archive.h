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

#ifndef SPEEDLAB_CORE_ARCHIVE_H_
#define SPEEDLAB_CORE_ARCHIVE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace speedlab {

// Writes/reads flat little-endian float32 arrays. The container format shared
// by datasets and checkpoints is a JSON manifest next to such files.
void WriteFloat32File(const std::filesystem::path& path,
                      std::span<const float> values);
std::vector<float> ReadFloat32File(const std::filesystem::path& path);

// Double-precision values are narrowed to float32 on write.
void WriteFloat32File(const std::filesystem::path& path,
                      std::span<const double> values);

// 64-bit FNV-1a over raw bytes.
std::uint64_t Fnv1a64(std::span<const std::byte> bytes,
                      std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t HashDoubles(std::span<const double> values);
std::uint64_t HashFile(const std::filesystem::path& path);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace speedlab

#endif  // SPEEDLAB_CORE_ARCHIVE_H_
