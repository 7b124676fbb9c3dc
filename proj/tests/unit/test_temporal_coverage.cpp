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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <vector>

#include "core/common.hpp"
#include "core/temporal_coverage.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gits;

namespace {

// Double loop over every candidate and window, written without the state.
CoverageValues NaiveCoverage(const std::vector<int>& sel, const CandidateSet& c,
                             const WindowList& w, double tau, double tau_w) {
  CoverageValues v;
  if (sel.empty()) return v;
  for (int i : c.indices) {
    double best = 0.0;
    for (int j : sel) best = std::max(best, std::exp(-std::abs(i - j) / tau));
    v.f_cov += best;
  }
  for (const Window& m : w.intervals) {
    double best = 0.0;
    for (int j : sel) {
      int d = 1 << 30;
      for (int p = m.a; p <= m.b; ++p) d = std::min(d, std::abs(j - p));
      best = std::max(best, std::exp(-d / tau_w));
    }
    v.f_win += best;
  }
  return v;
}

std::vector<int> RandomSubset(const CandidateSet& c, int size, std::mt19937_64& rng) {
  std::vector<int> s = c.indices;
  std::shuffle(s.begin(), s.end(), rng);
  s.resize(static_cast<std::size_t>(size));
  return s;
}

CoverageState Fold(const std::vector<int>& sel, const CandidateSet& c,
                   const WindowList& w, const CoverageConfig& cfg) {
  CoverageState st = CoverageState::Empty(c, w);
  for (int k : sel) UpdateState(st, k, c, w, cfg);
  return st;
}

}  // namespace

TEST_CASE("derived coverage parameters") {
  const CoverageConfig a = DeriveCoverageConfig(101, 10);
  CHECK(a.tau == 10);
  CHECK(a.window_size == 20);
  CHECK(a.window_stride == 10);
  CHECK(a.tau_w == 5);
  CHECK(a.derived_t_count == 101);
  CHECK(a.derived_budget == 10);

  const CoverageConfig b = DeriveCoverageConfig(101, 96);
  CHECK(b.tau == 1);
  CHECK(b.window_size == 2);
  CHECK(b.window_stride == 1);
  CHECK(b.tau_w == 1);

  const CoverageConfig c = DeriveCoverageConfig(8, 1);
  CHECK(c.tau == 8);
  CHECK(c.window_size == 16);
  const WindowList w = BuildWindows(BuildCandidates(8, 4), c);
  REQUIRE(w.count() == 1);
  CHECK(w.intervals[0] == Window{4, 6});

  CHECK_THROWS_AS(DeriveCoverageConfig(101, 0), Error);
}

TEST_CASE("invalid coverage configurations are rejected") {
  CoverageConfig c;
  c.window_size = 4;
  c.window_stride = 5;
  CHECK_THROWS_AS(c.Validate(), Error);
  c.window_stride = 2;
  c.tau = 0.5;
  CHECK_THROWS_AS(c.Validate(), Error);
}

TEST_CASE("global kernel values") {
  CHECK(KernelGlobal(5, 5, 3.0) == 1.0);
  CHECK(KernelGlobal(2, 9, 7.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(KernelGlobal(3, 7, 2.5) == KernelGlobal(7, 3, 2.5));
  CHECK(KernelGlobal(3, 4, 2.0) < 1.0);
}

TEST_CASE("window construction") {
  const CandidateSet c = BuildCandidates(101, 4);
  const WindowList w = BuildWindows(c, DeriveCoverageConfig(101, 10));
  REQUIRE(w.count() >= 2);
  CHECK(w.intervals[0] == Window{4, 23});
  CHECK(w.intervals[1] == Window{14, 33});
  CHECK(w.intervals.back().b == 99);

  CoverageConfig big;
  big.window_size = 200;
  big.window_stride = 100;
  const WindowList one = BuildWindows(c, big);
  REQUIRE(one.count() == 1);
  CHECK(one.intervals[0] == Window{4, 99});
}

TEST_CASE("windows always cover the candidate axis") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int t_count = std::uniform_int_distribution<int>(6, 120)(rng);
    const CandidateSet c = BuildCandidates(t_count, 4);
    CoverageConfig cfg;
    cfg.window_size = std::uniform_int_distribution<int>(1, 40)(rng);
    cfg.window_stride = std::uniform_int_distribution<int>(1, cfg.window_size)(rng);
    const WindowList w = BuildWindows(c, cfg);
    std::vector<bool> covered(static_cast<std::size_t>(t_count), false);
    for (std::size_t m = 0; m < w.count(); ++m) {
      const Window& iv = w.intervals[m];
      CHECK(iv.a <= iv.b);
      CHECK(iv.a >= c.front());
      CHECK(iv.b <= c.back());
      if (m > 0) CHECK(w.intervals[m - 1].a < iv.a);
      for (int p = iv.a; p <= iv.b; ++p) covered[static_cast<std::size_t>(p)] = true;
    }
    for (int k : c.indices) CHECK(covered[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("window kernel uses the distance to the interval") {
  const Window w{10, 20};
  CHECK(KernelWindow(w, 15, 3.0) == 1.0);
  CHECK(KernelWindow(w, 10, 3.0) == 1.0);
  CHECK(KernelWindow(w, 7, 3.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(KernelWindow(w, 23, 3.0) == doctest::Approx(std::exp(-1.0)));
  for (int j = 0; j < 40; ++j) {
    int d = 1 << 30;
    for (int p = w.a; p <= w.b; ++p) d = std::min(d, std::abs(j - p));
    CHECK(WindowDistance(w, j) == d);
  }
}

TEST_CASE("coverage of the full and empty selections") {
  const CandidateSet c = BuildCandidates(101, 4);
  const CoverageConfig cfg = DeriveCoverageConfig(101, 10);
  const WindowList w = BuildWindows(c, cfg);
  const CoverageValues all = ComputeCoverage(c.indices, c, w, cfg);
  CHECK(all.f_cov == static_cast<double>(c.size()));
  CHECK(all.f_win == static_cast<double>(w.count()));
  const CoverageValues none = ComputeCoverage(std::vector<int>{}, c, w, cfg);
  CHECK(none.f_cov == 0.0);
  CHECK(none.f_win == 0.0);
  CHECK_THROWS_AS(ComputeCoverage(std::vector<int>{3}, c, w, cfg), Error);
}

TEST_CASE("coverage matches the double-loop oracle") {
  const CandidateSet c = BuildCandidates(35, 4);
  REQUIRE(c.size() == 30);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = std::uniform_int_distribution<int>(1, 8)(rng);
    const CoverageConfig cfg = DeriveCoverageConfig(35, k);
    const WindowList w = BuildWindows(c, cfg);
    const std::vector<int> sel = RandomSubset(c, k, rng);
    const CoverageValues got = ComputeCoverage(sel, c, w, cfg);
    const CoverageValues want = NaiveCoverage(sel, c, w, cfg.tau, cfg.tau_w);
    CHECK(std::abs(got.f_cov - want.f_cov) <= 1e-12);
    CHECK(std::abs(got.f_win - want.f_win) <= 1e-12);
  }
}

TEST_CASE("incremental state agrees with batch evaluation") {
  const CandidateSet c = BuildCandidates(101, 4);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = std::uniform_int_distribution<int>(1, 20)(rng);
    const CoverageConfig cfg = DeriveCoverageConfig(101, k);
    const WindowList w = BuildWindows(c, cfg);
    const std::vector<int> sel = RandomSubset(c, k, rng);
    const CoverageState st = Fold(sel, c, w, cfg);
    const CoverageValues batch = ComputeCoverage(sel, c, w, cfg);
    CHECK(std::abs(st.total_cov() - batch.f_cov) <= 1e-12);
    CHECK(std::abs(st.total_win() - batch.f_win) <= 1e-12);
    CHECK(st.selected_count == k);
    for (double m : st.m) CHECK((m >= 0.0 && m <= 1.0));
    for (double u : st.u) CHECK((u >= 0.0 && u <= 1.0));

    std::vector<int> perm = sel;
    std::shuffle(perm.begin(), perm.end(), rng);
    const CoverageState other = Fold(perm, c, w, cfg);
    CHECK(other.m == st.m);
    CHECK(other.u == st.u);
  }
}

TEST_CASE("state updates reject duplicates and non-candidates") {
  const CandidateSet c = BuildCandidates(30, 4);
  const CoverageConfig cfg = DeriveCoverageConfig(30, 3);
  const WindowList w = BuildWindows(c, cfg);
  CoverageState st = CoverageState::Empty(c, w);
  for (double m : st.m) CHECK(m == 0.0);
  UpdateState(st, 10, c, w, cfg);
  CHECK_THROWS_AS(UpdateState(st, 10, c, w, cfg), Error);
  CHECK_THROWS_AS(UpdateState(st, 2, c, w, cfg), Error);
  const CoverageState next = StateUpdate(st, 12, c, w, cfg);
  CHECK(next.selected_count == 2);
  CHECK(st.selected_count == 1);
}

TEST_CASE("coverage is monotone, submodular and bounded") {
  const CandidateSet c = BuildCandidates(60, 4);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const CoverageConfig cfg =
        DeriveCoverageConfig(60, std::uniform_int_distribution<int>(1, 12)(rng));
    const WindowList w = BuildWindows(c, cfg);
    std::vector<int> order = c.indices;
    std::shuffle(order.begin(), order.end(), rng);
    const int nt = std::uniform_int_distribution<int>(1, 15)(rng);
    const int ns = std::uniform_int_distribution<int>(0, nt)(rng);
    const std::vector<int> t(order.begin(), order.begin() + nt);
    const std::vector<int> s(order.begin(), order.begin() + ns);
    const int k = order[static_cast<std::size_t>(nt)];

    const CoverageValues vs = ComputeCoverage(s, c, w, cfg);
    const CoverageValues vt = ComputeCoverage(t, c, w, cfg);
    CHECK(vs.f_cov <= vt.f_cov + 1e-12);
    CHECK(vs.f_win <= vt.f_win + 1e-12);
    CHECK(vt.f_cov <= static_cast<double>(c.size()));
    CHECK(vt.f_win <= static_cast<double>(w.count()));

    const CoverageGain gs = MarginalCoverageGain(Fold(s, c, w, cfg), k, c, w, cfg);
    const CoverageGain gt = MarginalCoverageGain(Fold(t, c, w, cfg), k, c, w, cfg);
    CHECK(gs.cov >= gt.cov - 1e-12);
    CHECK(gs.win >= gt.win - 1e-12);
    CHECK(gt.cov >= 0.0);
    CHECK(gt.win >= 0.0);
  }
}

TEST_CASE("kernel sign flip hook breaks the oracle agreement") {
  const CandidateSet c = BuildCandidates(20, 4);
  const CoverageConfig cfg = DeriveCoverageConfig(20, 3);
  const WindowList w = BuildWindows(c, cfg);
  const std::vector<int> sel = {5, 12};
  testing::SetKernelSignFlip(true);
  const CoverageValues flipped = ComputeCoverage(sel, c, w, cfg);
  testing::SetKernelSignFlip(false);
  const CoverageValues want = NaiveCoverage(sel, c, w, cfg.tau, cfg.tau_w);
  CHECK(std::abs(flipped.f_cov - want.f_cov) > 1e-3);
  CHECK(ComputeCoverage(sel, c, w, cfg).f_cov == doctest::Approx(want.f_cov));
}

TEST_CASE("window export writes one row per window") {
  const auto dir = gits_test::TempDir("windows");
  const CandidateSet c = BuildCandidates(101, 4);
  const WindowList w = BuildWindows(c, DeriveCoverageConfig(101, 10));
  const std::string path = (dir / "w.csv").string();
  WriteWindowsCsv(w, path);
  std::ifstream in(path);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == static_cast<int>(w.count()));
}
