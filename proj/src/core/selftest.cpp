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

#include "core/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "core/common.hpp"
#include "core/pde_data.hpp"
#include "core/selector.hpp"
#include "core/surrogate.hpp"
#include "core/temporal_coverage.hpp"

namespace gits {

namespace {

constexpr int kHistory = 4;

std::string Fmt(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

void Fail(SuiteResult& r, const std::string& why) {
  if (r.passed) r.detail = why;
  r.passed = false;
}

// Best F over all K-subsets of C.
double ExhaustiveOptimum(const std::vector<double>& scores,
                         const CandidateSet& c, const WindowList& w,
                         const ObjectiveConfig& obj, int budget) {
  const int n = static_cast<int>(c.size());
  std::vector<int> pick(static_cast<std::size_t>(budget));
  std::iota(pick.begin(), pick.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> sel(static_cast<std::size_t>(budget));
  while (true) {
    for (int i = 0; i < budget; ++i) {
      sel[static_cast<std::size_t>(i)] =
          c.indices[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    }
    best = std::max(best, ObjectiveValue(sel, scores, c, w, obj));
    int i = budget - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - budget + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < budget; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

SuiteResult GreedySuite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "greedy";
  std::mt19937_64 rng(DeriveSeed(seed, "selftest_greedy"));
  std::uniform_int_distribution<int> size_d(6, 12), k_d(2, 4);
  std::uniform_real_distribution<double> u01(0.0, 1.0), w_d(0.0, 2.0);
  const double bound = 1.0 - std::exp(-1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int inst = 0; inst < 50; ++inst) {
    const int n = size_d(rng);
    const CandidateSet c = BuildCandidates(n + kHistory + 1, kHistory);
    const int budget = k_d(rng);
    std::vector<double> scores(c.size());
    for (double& s : scores) s = u01(rng);
    ObjectiveConfig obj;
    obj.lambda_cov = w_d(rng);
    obj.c_win = w_d(rng);
    obj.coverage = DeriveCoverageConfig(c.t_count, budget);
    const WindowList w = BuildWindows(c, obj.coverage);

    const SelectionResult g = GreedySelect(scores, c, obj, budget);
    const double opt = ExhaustiveOptimum(scores, c, w, obj, budget);
    ++r.checks;
    if (opt > 0.0) worst = std::min(worst, g.objective / opt);
    if (g.objective < bound * opt - 1e-9) {
      Fail(r, Fmt("instance %.0f: greedy %.6g below bound of optimum %.6g",
                  inst, g.objective, opt));
    }
    // Recorded gains must equal from-scratch prefix differences.
    double prev = 0.0;
    for (int step = 0; step < budget; ++step) {
      std::span<const int> prefix(g.selected.data(),
                                  static_cast<std::size_t>(step + 1));
      const double f = ObjectiveValue(prefix, scores, c, w, obj);
      ++r.checks;
      if (std::abs((f - prev) - g.gains[static_cast<std::size_t>(step)]) > 1e-9) {
        Fail(r, Fmt("instance %.0f step %.0f: incremental gain off by %.3g", inst,
                    step, std::abs((f - prev) - g.gains[static_cast<std::size_t>(step)])));
      }
      prev = f;
    }
  }
  if (r.passed) r.detail = Fmt("50 instances, worst greedy/optimum ratio %.4f", worst);
  return r;
}

SuiteResult CoverageSuite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "coverage";
  std::mt19937_64 rng(DeriveSeed(seed, "selftest_coverage"));
  const CandidateSet c = BuildCandidates(101, kHistory);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> order = c.indices;
    std::shuffle(order.begin(), order.end(), rng);
    const int k = std::uniform_int_distribution<int>(1, 20)(rng);
    const CoverageConfig cfg = DeriveCoverageConfig(c.t_count, k);
    const WindowList w = BuildWindows(c, cfg);
    CoverageState state = CoverageState::Empty(c, w);
    for (int i = 0; i < k; ++i) {
      UpdateState(state, order[static_cast<std::size_t>(i)], c, w, cfg);
    }
    const CoverageValues v = ComputeCoverage(
        std::span<const int>(order.data(), static_cast<std::size_t>(k)), c, w, cfg);
    const double err = std::max(std::abs(state.total_cov() - v.f_cov),
                                std::abs(state.total_win() - v.f_win));
    worst = std::max(worst, err);
    ++r.checks;
    if (err > 1e-12) {
      Fail(r, Fmt("trial %.0f: incremental and batch totals differ by %.3g",
                  trial, err));
    }
  }
  if (r.passed) r.detail = Fmt("20 selections on |C|=96, max deviation %.3g", worst);
  return r;
}

SuiteResult SubmodularitySuite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "submodularity";
  std::mt19937_64 rng(DeriveSeed(seed, "selftest_submodularity"));
  for (int inst = 0; inst < 50; ++inst) {
    const int n = std::uniform_int_distribution<int>(6, 30)(rng);
    const CandidateSet c = BuildCandidates(n + kHistory + 1, kHistory);
    ObjectiveConfig obj;
    obj.lambda_cov = 1.0;
    obj.c_win = 1.0;
    obj.coverage =
        DeriveCoverageConfig(c.t_count, std::uniform_int_distribution<int>(1, 4)(rng));
    const WindowList w = BuildWindows(c, obj.coverage);

    std::vector<int> order = c.indices;
    std::shuffle(order.begin(), order.end(), rng);
    const int k = order.back();
    const int b_size =
        std::uniform_int_distribution<int>(1, static_cast<int>(c.size()) - 1)(rng);
    const int a_size = inst % 3 == 0
                           ? 0
                           : std::uniform_int_distribution<int>(0, b_size)(rng);
    std::vector<int> b(order.begin(), order.begin() + b_size);
    std::vector<int> a(order.begin(), order.begin() + a_size);

    auto gain = [&](std::vector<int> s) {
      const double before = ObjectiveValue(s, {}, c, w, obj);
      s.push_back(k);
      return ObjectiveValue(s, {}, c, w, obj) - before;
    };
    const double ga = gain(a);
    const double gb = gain(b);
    r.checks += 2;
    if (ga < gb - 1e-12) {
      Fail(r, Fmt("instance %.0f: gain on |A|=%.0f is below gain on superset (%.6g)",
                  inst, a_size, gb - ga));
    }
    if (gb < -1e-12) {
      Fail(r, Fmt("instance %.0f: negative marginal gain %.6g", inst, gb));
    }
  }
  if (r.passed) r.detail = "50 nested pairs, empty base set included";
  return r;
}

SuiteResult GradientSuite(std::uint64_t seed) {
  SuiteResult r;
  r.name = "gradient";
  SolverConfig sc;
  sc.spatial_size = 16;
  sc.t_count = 12;
  sc.seed = seed;
  const TrajectoryDataset ds = GenerateDataset(sc, 10);
  SurrogateArch arch;
  arch.hidden = 3;
  arch.radius = 1;
  arch.padding = PaddingFor(ds.boundary());
  // Every coordinate random so no gradient block is trivially zero.
  SurrogateParams p = ZeroParams(arch);
  std::mt19937_64 rng(DeriveSeed(seed, "selftest_gradient"));
  std::uniform_real_distribution<double> theta_d(-0.5, 0.5);
  for (double& t : p.theta) t = theta_d(rng);

  std::uniform_int_distribution<int> traj_d(0, ds.n_traj() - 1);
  std::uniform_int_distribution<int> start_d(kHistory, ds.t_count() - 2);
  const double h = 1e-6;
  double worst = 0.0;
  for (int horizon : {1, 3}) {
    for (int pair = 0; pair < 4; ++pair) {
      const StartPair sp{traj_d(rng), pair == 0 ? ds.t_count() - 2 : start_d(rng)};
      const std::vector<StartPair> batch = {sp};
      const LossGrad lg = RolloutLossGrad(p, batch, horizon, ds);
      double scale = 0.0;
      std::vector<double> fd(p.theta.size());
      for (std::size_t i = 0; i < p.theta.size(); ++i) {
        SurrogateParams q = p;
        q.theta[i] += h;
        const double up = RolloutLossGrad(q, batch, horizon, ds).loss;
        q.theta[i] -= 2.0 * h;
        const double down = RolloutLossGrad(q, batch, horizon, ds).loss;
        fd[i] = (up - down) / (2.0 * h);
        scale = std::max(scale, std::abs(fd[i]));
      }
      for (std::size_t i = 0; i < fd.size(); ++i) {
        const double denom = std::max({std::abs(fd[i]), std::abs(lg.grad[i]),
                                       1e-3 * scale, 1e-12});
        const double rel = std::abs(fd[i] - lg.grad[i]) / denom;
        worst = std::max(worst, rel);
        ++r.checks;
        if (rel > 1e-4) {
          Fail(r, Fmt("H=%.0f parameter %.0f: relative error %.3g", horizon,
                      static_cast<double>(i), rel));
        }
      }
    }
  }
  if (r.passed) {
    r.detail = Fmt("%.0f parameters, max relative error %.3g",
                   static_cast<double>(p.theta.size()), worst);
  }
  return r;
}

}  // namespace

bool SelftestReport::passed() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.passed; });
}

std::string SelftestReport::Text() const {
  std::ostringstream out;
  for (const SuiteResult& s : suites) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-14s %s  %5d checks  %7.2f s  ", s.name.c_str(),
                  s.passed ? "PASS" : "FAIL", s.checks, s.time_s);
    out << buf << s.detail << "\n";
  }
  out << (passed() ? "selftest: PASS" : "selftest: FAIL") << " (" << suites.size()
      << " suites)\n";
  return out.str();
}

const std::vector<std::string>& SelftestSuiteNames() {
  static const std::vector<std::string> names = {"greedy", "coverage",
                                                 "submodularity", "gradient"};
  return names;
}

SelftestReport RunSelftest(const std::vector<std::string>& suites,
                           std::uint64_t seed) {
  for (const std::string& s : suites) {
    const auto& all = SelftestSuiteNames();
    if (std::find(all.begin(), all.end(), s) == all.end()) {
      Throw(ErrorCode::kInvalidArgument, "unknown selftest suite '" + s + "'");
    }
  }
  SelftestReport report;
  for (const std::string& s : suites) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      if (s == "greedy") r = GreedySuite(seed);
      if (s == "coverage") r = CoverageSuite(seed);
      if (s == "submodularity") r = SubmodularitySuite(seed);
      if (s == "gradient") r = GradientSuite(seed);
    } catch (const Error& e) {
      r.name = s;
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                   .count();
    report.suites.push_back(std::move(r));
  }
  return report;
}

}  // namespace gits
