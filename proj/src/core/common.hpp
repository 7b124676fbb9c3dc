// Copyright 2026 The Authors.
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

#ifndef GITS_CORE_COMMON_HPP_
#define GITS_CORE_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gits {

// Error categories. The numeric values are the C API status codes.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kConfig = 2,
  kIo = 3,
  kFormat = 4,
  kShape = 5,
  kGeneration = 6,
  kDivergence = 7,
  kMetric = 8,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

std::string_view ToString(ErrorCode code);

[[noreturn]] void Throw(ErrorCode code, const std::string& what);

inline void Require(bool cond, ErrorCode code, std::string_view what) {
  if (!cond) Throw(code, std::string(what));
}

// Stateless 64-bit mixer; used to derive independent sub-seeds.
std::uint64_t SplitMix64(std::uint64_t x);

// Sub-seed for a named stage ("pilot", "train", ...) and an ordinal.
std::uint64_t DeriveSeed(std::uint64_t base, std::string_view stage,
                         std::uint64_t index = 0);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
// visited exactly once; the first exception is rethrown on the caller.
// workers <= 0 picks std::thread::hardware_concurrency().
void ParallelFor(std::size_t n, int workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace gits

#endif  // GITS_CORE_COMMON_HPP_
