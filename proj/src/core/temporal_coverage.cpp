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

#include "core/temporal_coverage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>

#include "core/common.hpp"

namespace gits {

namespace {
std::atomic<bool> g_kernel_sign_flip{false};
}  // namespace

namespace testing {
void SetKernelSignFlip(bool enabled) { g_kernel_sign_flip.store(enabled); }
}  // namespace testing

void CoverageConfig::Validate() const {
  Require(tau >= 1.0 && std::isfinite(tau), ErrorCode::kConfig, "tau must be >= 1");
  Require(tau_w >= 1.0 && std::isfinite(tau_w), ErrorCode::kConfig,
          "tau_w must be >= 1");
  Require(window_size >= 1, ErrorCode::kConfig, "window_size must be >= 1");
  Require(window_stride >= 1 && window_stride <= window_size,
          ErrorCode::kConfig, "window_stride must lie in [1, window_size]");
}

CoverageConfig DeriveCoverageConfig(int t_count, int budget) {
  Require(budget >= 1, ErrorCode::kInvalidArgument, "budget K must be >= 1");
  Require(t_count >= 1, ErrorCode::kInvalidArgument, "t_count must be >= 1");
  const int spacing = t_count / budget;
  CoverageConfig c;
  c.tau = std::max(1, spacing);
  c.window_size = std::max(1, 2 * spacing);
  c.window_stride = std::max(1, c.window_size / 2);
  c.tau_w = std::max(1, c.window_size / 4);
  c.derived_t_count = t_count;
  c.derived_budget = budget;
  return c;
}

double KernelGlobal(int i, int j, double tau) {
  const double v = std::exp(-std::abs(i - j) / tau);
  return g_kernel_sign_flip.load(std::memory_order_relaxed) ? -v : v;
}

WindowList BuildWindows(const CandidateSet& candidates,
                        const CoverageConfig& cfg) {
  cfg.Validate();
  Require(candidates.size() >= 1, ErrorCode::kInvalidArgument,
          "empty candidate set");
  WindowList out;
  const int lo = candidates.front();
  const int hi = candidates.back();
  for (int a = lo;; a += cfg.window_stride) {
    const int b = std::min(a + cfg.window_size - 1, hi);
    out.intervals.push_back({a, b});
    if (b >= hi) break;
  }
  return out;
}

int WindowDistance(const Window& w, int j) {
  if (j < w.a) return w.a - j;
  if (j > w.b) return j - w.b;
  return 0;
}

double KernelWindow(const Window& w, int j, double tau_w) {
  return std::exp(-WindowDistance(w, j) / tau_w);
}

CoverageValues ComputeCoverage(std::span<const int> selection,
                               const CandidateSet& candidates,
                               const WindowList& windows,
                               const CoverageConfig& cfg) {
  for (int j : selection) {
    if (!candidates.contains(j)) {
      Throw(ErrorCode::kInvalidArgument,
            "selected index " + std::to_string(j) + " is not a candidate");
    }
  }
  CoverageValues v;
  if (selection.empty()) return v;
  for (int i : candidates.indices) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j : selection) best = std::max(best, KernelGlobal(i, j, cfg.tau));
    v.f_cov += best;
  }
  for (const Window& w : windows.intervals) {
    double best = -std::numeric_limits<double>::infinity();
    for (int j : selection) best = std::max(best, KernelWindow(w, j, cfg.tau_w));
    v.f_win += best;
  }
  return v;
}

CoverageState CoverageState::Empty(const CandidateSet& candidates,
                                   const WindowList& windows) {
  CoverageState s;
  s.m.assign(candidates.size(), 0.0);
  s.u.assign(windows.count(), 0.0);
  s.selected.assign(candidates.size(), false);
  return s;
}

double CoverageState::total_cov() const {
  return std::accumulate(m.begin(), m.end(), 0.0);
}

double CoverageState::total_win() const {
  return std::accumulate(u.begin(), u.end(), 0.0);
}

CoverageGain MarginalCoverageGain(const CoverageState& state, int k,
                                  const CandidateSet& candidates,
                                  const WindowList& windows,
                                  const CoverageConfig& cfg) {
  CoverageGain g;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = KernelGlobal(candidates.indices[i], k, cfg.tau);
    g.cov += std::max(state.m[i], s) - state.m[i];
  }
  for (std::size_t w = 0; w < windows.count(); ++w) {
    const double r = KernelWindow(windows.intervals[w], k, cfg.tau_w);
    g.win += std::max(state.u[w], r) - state.u[w];
  }
  return g;
}

void UpdateState(CoverageState& state, int k, const CandidateSet& candidates,
                 const WindowList& windows, const CoverageConfig& cfg) {
  const std::size_t pos = candidates.position(k);
  if (state.selected[pos]) {
    Throw(ErrorCode::kInvalidArgument,
          "index " + std::to_string(k) + " is already selected");
  }
  state.selected[pos] = true;
  ++state.selected_count;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    state.m[i] = std::max(state.m[i], KernelGlobal(candidates.indices[i], k, cfg.tau));
  }
  for (std::size_t w = 0; w < windows.count(); ++w) {
    state.u[w] = std::max(state.u[w], KernelWindow(windows.intervals[w], k, cfg.tau_w));
  }
}

CoverageState StateUpdate(const CoverageState& state, int k,
                          const CandidateSet& candidates,
                          const WindowList& windows,
                          const CoverageConfig& cfg) {
  CoverageState next = state;
  UpdateState(next, k, candidates, windows, cfg);
  return next;
}

void WriteWindowsCsv(const WindowList& windows, const std::string& path) {
  std::ofstream out(path);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + path + " for writing");
  out << "m,a,b\n";
  for (std::size_t m = 0; m < windows.count(); ++m) {
    out << m << ',' << windows.intervals[m].a << ',' << windows.intervals[m].b
        << '\n';
  }
}

}  // namespace gits
