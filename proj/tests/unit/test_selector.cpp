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
#include <numeric>
#include <random>
#include <vector>

#include "core/common.hpp"
#include "core/selector.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace gits;

namespace {

ObjectiveConfig Objective(int t_count, int budget, double lambda, double c) {
  ObjectiveConfig o;
  o.lambda_cov = lambda;
  o.c_win = c;
  o.coverage = DeriveCoverageConfig(t_count, budget);
  return o;
}

CandidateScores Scores(std::vector<double> s, ScoreKind kind = ScoreKind::kGradNorm) {
  CandidateScores c;
  c.scores = std::move(s);
  c.kind = kind;
  return c;
}

std::vector<double> RandomScores(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> s(n);
  for (double& v : s) v = d(rng);
  return s;
}

// Best F over every K-subset, enumerated with a selection mask.
double ExhaustiveOptimum(const std::vector<double>& scores, const CandidateSet& c,
                         const ObjectiveConfig& obj, int budget) {
  const WindowList w = BuildWindows(c, obj.coverage);
  std::vector<bool> mask(c.size(), false);
  std::fill(mask.begin(), mask.begin() + budget, true);
  double best = -1.0;
  do {
    std::vector<int> s;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mask[i]) s.push_back(c.indices[i]);
    }
    best = std::max(best, ObjectiveValue(s, scores, c, w, obj));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

std::vector<int> TopK(const std::vector<double>& s, const CandidateSet& c, int k) {
  std::vector<std::size_t> pos(s.size());
  std::iota(pos.begin(), pos.end(), 0);
  std::stable_sort(pos.begin(), pos.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  std::vector<int> out;
  for (int i = 0; i < k; ++i) out.push_back(c.indices[pos[static_cast<std::size_t>(i)]]);
  return out;
}

double MatchResidual(const std::vector<std::vector<double>>& g,
                     const std::vector<std::size_t>& pick) {
  const std::size_t d = g[0].size();
  std::vector<double> mean_all(d, 0.0), mean_s(d, 0.0);
  for (const auto& v : g) {
    for (std::size_t i = 0; i < d; ++i) mean_all[i] += v[i] / g.size();
  }
  for (std::size_t p : pick) {
    for (std::size_t i = 0; i < d; ++i) mean_s[i] += g[p][i] / pick.size();
  }
  double r = 0.0;
  for (std::size_t i = 0; i < d; ++i) r += (mean_all[i] - mean_s[i]) * (mean_all[i] - mean_s[i]);
  return std::sqrt(r);
}

}  // namespace

TEST_CASE("sampler names round-trip") {
  for (SamplerKind s : AllSamplers()) CHECK(ParseSampler(ToString(s)) == s);
  CHECK(AllSamplers().size() == 7);
  CHECK_FALSE(UsesPilot(SamplerKind::kUniform));
  CHECK_FALSE(UsesPilot(SamplerKind::kCoverageOnly));
  CHECK(UsesPilot(SamplerKind::kGits));
  try {
    ParseSampler("glister");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
}

TEST_CASE("budget from ratio") {
  CHECK(BudgetFromRatio(0.1, 96) == 10);
  CHECK(BudgetFromRatio(0.05, 96) == 5);
  CHECK(BudgetFromRatio(0.2, 96) == 19);
  CHECK(BudgetFromRatio(0.001, 96) == 1);
  CHECK(BudgetFromRatio(1.0, 96) == 96);
  CHECK_THROWS_AS(BudgetFromRatio(0.0, 96), Error);
  CHECK_THROWS_AS(BudgetFromRatio(1.5, 96), Error);
}

TEST_CASE("zero coverage weights reduce greedy to top-K") {
  const CandidateSet c = BuildCandidates(40, 4);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s = RandomScores(c.size(), rng);
    s[5] = s[9] = 2.0;  // a tie at the top
    const int k = 1 + trial % 8;
    const ObjectiveConfig obj = Objective(40, k, 0.0, 0.0);
    const SelectionResult g = GreedySelect(s, c, obj, k);
    CHECK(g.selected == TopK(s, c, k));
    CHECK(SampleGradOnly(Scores(s), c, k).selected == g.selected);
    CHECK(SampleLossOnly(Scores(s, ScoreKind::kRolloutLoss), c, k).selected ==
          g.selected);
    CHECK(SampleLossDiv(Scores(s, ScoreKind::kRolloutLoss), c, obj, k).selected ==
          g.selected);
  }
}

TEST_CASE("zero scores and zero weights select the lowest indices") {
  const CandidateSet c = BuildCandidates(30, 4);
  const SelectionResult r =
      GreedySelect(std::vector<double>(c.size(), 0.0), c, Objective(30, 4, 0.0, 0.0), 4);
  CHECK(r.selected == std::vector<int>{4, 5, 6, 7});
}

TEST_CASE("greedy reaches the approximation bound on exhaustive instances") {
  const CandidateSet c = BuildCandidates(25, 4);
  REQUIRE(c.size() == 20);
  const ObjectiveConfig obj = Objective(25, 3, 1.0, 0.0);
  const std::vector<double> zeros(c.size(), 0.0);
  const SelectionResult g = GreedySelect(zeros, c, obj, 3);
  const double opt = ExhaustiveOptimum(zeros, c, obj, 3);
  CHECK(g.objective >= (1.0 - std::exp(-1.0)) * opt - 1e-9);
  CHECK(g.objective <= opt + 1e-9);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int t = std::uniform_int_distribution<int>(7, 18)(rng);
    const CandidateSet cs = BuildCandidates(t, 4);
    const int k = std::uniform_int_distribution<int>(
        1, std::min<int>(4, static_cast<int>(cs.size())))(rng);
    std::uniform_real_distribution<double> w(0.0, 2.0);
    const ObjectiveConfig o = Objective(t, k, w(rng), w(rng));
    const std::vector<double> s = RandomScores(cs.size(), rng);
    const double best = ExhaustiveOptimum(s, cs, o, k);
    CHECK(GreedySelect(s, cs, o, k).objective >= (1.0 - std::exp(-1.0)) * best - 1e-9);
  }
}

TEST_CASE("full budget saturates the objective") {
  const CandidateSet c = BuildCandidates(30, 4);
  std::mt19937_64 rng(2);
  const std::vector<double> s = RandomScores(c.size(), rng);
  const int k = static_cast<int>(c.size());
  const ObjectiveConfig obj = Objective(30, k, 1.0, 0.5);
  const WindowList w = BuildWindows(c, obj.coverage);
  const SelectionResult r = GreedySelect(s, c, obj, k);
  std::vector<int> sorted = r.selected;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == c.indices);
  const double want = std::accumulate(s.begin(), s.end(), 0.0) +
                      static_cast<double>(c.size()) + 0.5 * static_cast<double>(w.count());
  CHECK(r.objective == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(GreedySelect(s, c, obj, k + 1), Error);
  CHECK_THROWS_AS(GreedySelect(s, c, obj, 0), Error);
}

TEST_CASE("greedy gains are consistent and non-increasing") {
  const CandidateSet c = BuildCandidates(101, 4);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 2 + trial;
    const ObjectiveConfig obj = Objective(101, k, 1.0, 0.5);
    const WindowList w = BuildWindows(c, obj.coverage);
    const std::vector<double> s = RandomScores(c.size(), rng);
    const SelectionResult r = GreedySelect(s, c, obj, k);
    REQUIRE(r.gains.size() == static_cast<std::size_t>(k));
    std::vector<int> prefix;
    double prev = 0.0;
    for (int i = 0; i < k; ++i) {
      prefix.push_back(r.selected[static_cast<std::size_t>(i)]);
      const double now = ObjectiveValue(prefix, s, c, w, obj);
      CHECK(std::abs(r.gains[static_cast<std::size_t>(i)] - (now - prev)) <= 1e-9);
      if (i > 0) {
        CHECK(r.gains[static_cast<std::size_t>(i)] <=
              r.gains[static_cast<std::size_t>(i - 1)] + 1e-9);
      }
      prev = now;
    }
    CHECK(std::abs(r.objective - prev) <= 1e-9);
    CHECK(GreedySelect(s, c, obj, k, 3).selected == r.selected);
  }
}

TEST_CASE("uniform sampler spacing") {
  const CandidateSet c = BuildCandidates(101, 4);
  CHECK(SampleUniform(c, 96).selected == c.indices);
  CHECK(SampleUniform(c, 2).selected == std::vector<int>{4, 99});
  CHECK(SampleUniform(c, 1).selected.size() == 1);
  CHECK(SampleUniform(c, 5, 1).selected == SampleUniform(c, 5, 2).selected);
  for (int k = 2; k <= 96; ++k) {
    const std::vector<int> s = SampleUniform(c, k).selected;
    REQUIRE(s.size() == static_cast<std::size_t>(k));
    const double ideal = static_cast<double>(c.size() - 1) / (k - 1);
    for (int i = 1; i < k; ++i) {
      const int gap = s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(i - 1)];
      CHECK(std::abs(gap - ideal) <= 1.0);
    }
  }
  CHECK_THROWS_AS(SampleUniform(c, 97), Error);
}

TEST_CASE("top-K samplers are equivariant under score permutation") {
  const CandidateSet c = BuildCandidates(30, 4);
  std::mt19937_64 rng(4);
  const std::vector<double> s = RandomScores(c.size(), rng);
  std::vector<std::size_t> perm(c.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> ps(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) ps[perm[i]] = s[i];

  const std::vector<int> a = SampleLossOnly(Scores(s), c, 6).selected;
  const std::vector<int> b = SampleLossOnly(Scores(ps), c, 6).selected;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == c.indices[perm[c.position(a[i])]]);
  }
  const auto arg = std::max_element(s.begin(), s.end()) - s.begin();
  CHECK(SampleLossOnly(Scores(s), c, 1).selected ==
        std::vector<int>{c.indices[static_cast<std::size_t>(arg)]});
  CHECK(SampleGradOnly(Scores(s), c, static_cast<int>(c.size())).selected.size() ==
        c.size());
}

TEST_CASE("coverage-only picks the centre for a single start") {
  const CandidateSet c = BuildCandidates(25, 4);  // {4..23}, symmetric about 13.5
  const ObjectiveConfig obj = Objective(25, 1, 1.0, 0.5);
  const SelectionResult r = SampleCoverageOnly(c, obj, 1);
  REQUIRE(r.selected.size() == 1);
  const WindowList w = BuildWindows(c, obj.coverage);
  double best = -1.0;
  int arg = -1;
  for (int k : c.indices) {
    const double v = ObjectiveValue(std::vector<int>{k}, {}, c, w, obj);
    if (v > best + 1e-15) {
      best = v;
      arg = k;
    }
  }
  CHECK(r.selected[0] == arg);
  CHECK(std::abs(r.selected[0] - 13.5) <= 1.0);

  std::mt19937_64 rng(1);
  const std::vector<double> zeros(c.size(), 0.0);
  CHECK(SampleLossDiv(Scores(zeros, ScoreKind::kRolloutLoss), c, obj, 4).selected ==
        SampleCoverageOnly(c, obj, 4).selected);
}

TEST_CASE("normalized scores divide by the maximum") {
  const CandidateSet c = BuildCandidates(30, 4);
  std::mt19937_64 rng(9);
  std::vector<double> s = RandomScores(c.size(), rng);
  ObjectiveConfig obj = Objective(30, 4, 1.0, 0.5);
  obj.normalize_scores = true;
  const SelectionResult a = SampleGits(Scores(s), c, obj, 4);
  for (double& v : s) v *= 1000.0;
  CHECK(SampleGits(Scores(s), c, obj, 4).selected == a.selected);
}

TEST_CASE("gradient matching") {
  const CandidateSet c = BuildCandidates(14, 4);
  REQUIRE(c.size() == 9);
  SUBCASE("identical gradients select the first candidates") {
    const std::vector<std::vector<double>> g(c.size(), {1.0, -2.0, 0.5});
    CHECK(SampleGradMatch(g, c, 3).selected == std::vector<int>{4, 5, 6});
  }
  SUBCASE("full budget leaves no residual") {
    std::mt19937_64 rng(2);
    std::vector<std::vector<double>> g;
    for (std::size_t i = 0; i < c.size(); ++i) g.push_back(RandomScores(5, rng));
    CHECK(SampleGradMatch(g, c, static_cast<int>(c.size())).objective < 1e-12);
  }
  SUBCASE("greedy residual against the exhaustive optimum") {
    const CandidateSet ten = BuildCandidates(15, 4);
    REQUIRE(ten.size() == 10);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<std::vector<double>> g(ten.size(), std::vector<double>(5));
    for (auto& v : g) {
      for (double& x : v) x = d(rng);
    }
    const SelectionResult r = SampleGradMatch(g, ten, 2);
    std::vector<std::size_t> pick;
    for (int k : r.selected) pick.push_back(ten.position(k));
    CHECK(std::abs(r.objective - MatchResidual(g, pick)) <= 1e-9);
    double opt = 1e300, opt1 = 1e300;
    for (std::size_t a = 0; a < ten.size(); ++a) {
      opt1 = std::min(opt1, MatchResidual(g, {a}));
      for (std::size_t b = a + 1; b < ten.size(); ++b) {
        opt = std::min(opt, MatchResidual(g, {a, b}));
      }
    }
    CHECK(r.objective >= opt - 1e-9);
    CHECK(std::abs(r.gains.size() - 2.0) == 0.0);
    CHECK(std::abs(SampleGradMatch(g, ten, 1).objective - opt1) <= 1e-9);
    MESSAGE("greedy/optimal residual ratio " << r.objective / opt);
  }
}

TEST_CASE("selection JSON round-trip") {
  const auto dir = gits_test::TempDir("selection");
  const CandidateSet c = BuildCandidates(30, 4);
  std::mt19937_64 rng(5);
  SelectionResult r =
      SampleGits(Scores(RandomScores(c.size(), rng)), c, Objective(30, 3, 1.0, 0.5), 3);
  r.wall_time_s = 0.25;
  const std::string path = (dir / "sel.json").string();
  WriteSelectionJson(r, path, nlohmann::json{{"lambda_cov", 1.0}});
  const SelectionResult back = ReadSelectionJson(path);
  CHECK(back.selected == r.selected);
  CHECK(back.gains == r.gains);
  CHECK(back.objective == r.objective);
  CHECK(back.sampler == SamplerKind::kGits);
  CHECK(back.budget == 3);
  const nlohmann::json j = ToJson(r);
  for (const char* key : {"sampler", "K", "selected", "gains", "objective", "wall_time"}) {
    CHECK(j.contains(key));
  }
  CHECK_THROWS_AS(SelectionFromJson(nlohmann::json{{"sampler", "gits"}}), Error);
}
