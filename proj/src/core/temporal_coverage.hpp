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

// Facility-location coverage over the candidate time axis.
//
//   F_cov(S) = sum_{i in C} max_{j in S} exp(-|i - j| / tau)
//   F_win(S) = sum_{m}      max_{j in S} exp(-d(m, j) / tau_w)
//
// where d(m, j) is the distance from j to window [a_m, b_m]. Both terms are
// monotone submodular. CoverageState holds the running maxima so that the
// marginal gain of a candidate costs O(|C| + M).

#ifndef GITS_CORE_TEMPORAL_COVERAGE_HPP_
#define GITS_CORE_TEMPORAL_COVERAGE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/pilot_scoring.hpp"

namespace gits {

struct CoverageConfig {
  double tau = 1.0;
  int window_size = 1;
  int window_stride = 1;
  double tau_w = 1.0;
  // Provenance when derived from the budget; zero otherwise.
  int derived_t_count = 0;
  int derived_budget = 0;

  void Validate() const;
};

// tau = floor(T_c/K), W = 2 floor(T_c/K), S_w = floor(W/2), tau_w = floor(W/4),
// each lifted to at least 1.
CoverageConfig DeriveCoverageConfig(int t_count, int budget);

double KernelGlobal(int i, int j, double tau);

struct Window {
  int a = 0;
  int b = 0;
  bool operator==(const Window&) const = default;
};

struct WindowList {
  std::vector<Window> intervals;
  std::size_t count() const { return intervals.size(); }
};

// Windows [a, min(a + W - 1, max C)] for a = min C, min C + S_w, ..., stopping
// at the first window that reaches max C.
WindowList BuildWindows(const CandidateSet& candidates,
                        const CoverageConfig& cfg);

int WindowDistance(const Window& w, int j);
double KernelWindow(const Window& w, int j, double tau_w);

struct CoverageValues {
  double f_cov = 0.0;
  double f_win = 0.0;
};

// From-scratch evaluation. The empty selection scores (0, 0).
CoverageValues ComputeCoverage(std::span<const int> selection,
                               const CandidateSet& candidates,
                               const WindowList& windows,
                               const CoverageConfig& cfg);

struct CoverageState {
  std::vector<double> m;       // per candidate position
  std::vector<double> u;       // per window
  std::vector<bool> selected;  // per candidate position
  int selected_count = 0;

  static CoverageState Empty(const CandidateSet& candidates,
                             const WindowList& windows);
  double total_cov() const;
  double total_win() const;
};

struct CoverageGain {
  double cov = 0.0;
  double win = 0.0;
};

// sum_i (max(m_i, S_ik) - m_i) and sum_m (max(u_m, R_mk) - u_m).
CoverageGain MarginalCoverageGain(const CoverageState& state, int k,
                                  const CandidateSet& candidates,
                                  const WindowList& windows,
                                  const CoverageConfig& cfg);

// Folds k into the state. Throws kInvalidArgument if k is not a candidate
// or was already folded in.
void UpdateState(CoverageState& state, int k, const CandidateSet& candidates,
                 const WindowList& windows, const CoverageConfig& cfg);

// Value-returning form of UpdateState.
CoverageState StateUpdate(const CoverageState& state, int k,
                          const CandidateSet& candidates,
                          const WindowList& windows, const CoverageConfig& cfg);

void WriteWindowsCsv(const WindowList& windows, const std::string& path);

namespace testing {
// Mutation hook for sensitivity checks: negates KernelGlobal's output.
void SetKernelSignFlip(bool enabled);
}  // namespace testing

}  // namespace gits

#endif  // GITS_CORE_TEMPORAL_COVERAGE_HPP_
