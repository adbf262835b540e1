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

#ifndef SPEEDLAB_CORE_ERROR_H_
#define SPEEDLAB_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace speedlab {

// Base error for every failure raised by the library. The message names the
// failing stage so the CLI can report it verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when training or an RL update produces non-finite values.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace speedlab

#endif  // SPEEDLAB_CORE_ERROR_H_
