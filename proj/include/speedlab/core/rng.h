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

#ifndef SPEEDLAB_CORE_RNG_H_
#define SPEEDLAB_CORE_RNG_H_

#include <cstdint>
#include <random>

namespace speedlab {

// Well-known stream ids. Every random draw in the library flows through a
// stream derived from (seed, id), so an experiment is a pure function of its
// seed.
enum class Stream : std::uint64_t {
  kDemos = 1,
  kAugment = 2,
  kDiffusionNoise = 3,
  kEnvReset = 4,
  kMinibatch = 5,
  kEval = 6,
  kInit = 7,
  kExploration = 8,
  kPolicy = 9,
};

// Deterministic random stream keyed by (seed, stream_id).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);
  RngStream(std::uint64_t seed, Stream stream)
      : RngStream(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream; independent of this one and of other children.
  RngStream Fork(std::uint64_t child_id) const;

  double Uniform();                      // [0, 1)
  double Uniform(double lo, double hi);  // [lo, hi)
  double Normal();                       // N(0, 1)
  int UniformInt(int lo, int hi);        // inclusive bounds

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// SplitMix64 finalizer; used for seed derivation.
std::uint64_t MixBits(std::uint64_t x);

}  // namespace speedlab

#endif  // SPEEDLAB_CORE_RNG_H_
