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

// Small-scale oracle suites runnable from the shipped binary:
//
//   greedy         greedy vs exhaustive optimum, (1 - 1/e) bound
//   coverage       incremental coverage state vs from-scratch evaluation
//   submodularity  diminishing returns and monotonicity of the coverage terms
//   gradient       reverse-mode rollout gradient vs central differences

#ifndef GITS_CORE_SELFTEST_HPP_
#define GITS_CORE_SELFTEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace gits {

struct SuiteResult {
  std::string name;
  bool passed = true;
  int checks = 0;
  std::string detail;
  double time_s = 0.0;
};

struct SelftestReport {
  std::vector<SuiteResult> suites;

  bool passed() const;
  std::string Text() const;
};

const std::vector<std::string>& SelftestSuiteNames();

// Unknown suite names raise kInvalidArgument. An empty list passes.
SelftestReport RunSelftest(const std::vector<std::string>& suites,
                           std::uint64_t seed = 0);

}  // namespace gits

#endif  // GITS_CORE_SELFTEST_HPP_
