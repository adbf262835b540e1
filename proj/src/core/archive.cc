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

#include "speedlab/core/archive.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "speedlab/core/error.h"

namespace speedlab {

static_assert(std::endian::native == std::endian::little,
              "float32 archives are written in host order; big-endian hosts "
              "need a byte swap here");

void WriteFloat32File(const std::filesystem::path& path,
                      std::span<const float> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size_bytes()));
  if (!out) throw Error("write failed: " + path.string());
}

void WriteFloat32File(const std::filesystem::path& path,
                      std::span<const double> values) {
  std::vector<float> narrowed(values.begin(), values.end());
  WriteFloat32File(path, std::span<const float>(narrowed));
}

std::vector<float> ReadFloat32File(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error("missing file " + path.string());
  const auto size = static_cast<size_t>(in.tellg());
  if (size % sizeof(float) != 0) {
    throw Error("truncated float32 file " + path.string());
  }
  std::vector<float> values(size / sizeof(float));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(size));
  if (!in) throw Error("read failed: " + path.string());
  return values;
}

std::uint64_t Fnv1a64(std::span<const std::byte> bytes, std::uint64_t h) {
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t HashDoubles(std::span<const double> values) {
  return Fnv1a64(std::as_bytes(values));
}

std::uint64_t HashFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  return Fnv1a64(std::as_bytes(std::span<const char>(text.data(), text.size())));
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace speedlab
