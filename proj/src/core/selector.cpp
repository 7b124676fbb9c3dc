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

#include "core/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "core/common.hpp"

namespace gits {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void CheckBudget(int budget, std::size_t n) {
  Require(budget >= 1, ErrorCode::kInvalidArgument, "budget K must be >= 1");
  if (static_cast<std::size_t>(budget) > n) {
    Throw(ErrorCode::kInvalidArgument,
          "budget K=" + std::to_string(budget) + " exceeds |C|=" +
              std::to_string(n));
  }
}

void CheckScores(std::span<const double> scores, const CandidateSet& c) {
  if (scores.empty()) return;
  Require(scores.size() == c.size(), ErrorCode::kShape,
          "score vector does not match candidate set");
  for (double s : scores) {
    Require(std::isfinite(s), ErrorCode::kInvalidArgument,
            "non-finite candidate score");
  }
}

std::vector<double> MaybeNormalize(const std::vector<double>& scores,
                                   bool normalize) {
  if (!normalize || scores.empty()) return scores;
  const double mx = *std::max_element(scores.begin(), scores.end());
  if (!(mx > 0.0)) return scores;
  std::vector<double> out(scores);
  for (double& s : out) s /= mx;
  return out;
}

SelectionResult TopK(const CandidateScores& scores,
                     const CandidateSet& candidates, int budget,
                     SamplerKind kind) {
  const auto start = Clock::now();
  CheckBudget(budget, candidates.size());
  CheckScores(scores.scores, candidates);
  Require(!scores.scores.empty(), ErrorCode::kShape, "empty score vector");
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores.scores[a] > scores.scores[b];
  });
  SelectionResult r;
  r.sampler = kind;
  r.budget = budget;
  for (int i = 0; i < budget; ++i) {
    const std::size_t pos = order[static_cast<std::size_t>(i)];
    r.selected.push_back(candidates.indices[pos]);
    r.gains.push_back(scores.scores[pos]);
    r.objective += scores.scores[pos];
  }
  r.wall_time_s = SecondsSince(start);
  return r;
}

}  // namespace

std::string_view ToString(SamplerKind s) {
  switch (s) {
    case SamplerKind::kGits:
      return "gits";
    case SamplerKind::kUniform:
      return "uniform";
    case SamplerKind::kLossOnly:
      return "loss_only";
    case SamplerKind::kCoverageOnly:
      return "coverage_only";
    case SamplerKind::kGradOnly:
      return "grad_only";
    case SamplerKind::kLossDiv:
      return "loss_div";
    case SamplerKind::kGradMatch:
      return "grad_match";
  }
  return "?";
}

SamplerKind ParseSampler(std::string_view s) {
  for (SamplerKind k : AllSamplers()) {
    if (ToString(k) == s) return k;
  }
  Throw(ErrorCode::kConfig, "unknown sampler '" + std::string(s) + "'");
}

const std::vector<SamplerKind>& AllSamplers() {
  static const std::vector<SamplerKind> all = {
      SamplerKind::kGits,         SamplerKind::kUniform,
      SamplerKind::kLossOnly,     SamplerKind::kCoverageOnly,
      SamplerKind::kGradOnly,     SamplerKind::kLossDiv,
      SamplerKind::kGradMatch};
  return all;
}

bool UsesPilot(SamplerKind s) {
  return s != SamplerKind::kUniform && s != SamplerKind::kCoverageOnly;
}

void ObjectiveConfig::Validate() const {
  Require(lambda_cov >= 0.0 && std::isfinite(lambda_cov), ErrorCode::kConfig,
          "lambda_cov must be >= 0");
  Require(c_win >= 0.0 && std::isfinite(c_win), ErrorCode::kConfig,
          "c_win must be >= 0");
  coverage.Validate();
}

int BudgetFromRatio(double ratio, std::size_t n_candidates) {
  Require(ratio > 0.0 && ratio <= 1.0, ErrorCode::kConfig,
          "sampling ratio must lie in (0, 1]");
  const long k = std::lround(ratio * static_cast<double>(n_candidates));
  return static_cast<int>(std::max(1L, k));
}

double ObjectiveValue(std::span<const int> selection,
                      std::span<const double> scores,
                      const CandidateSet& candidates,
                      const WindowList& windows, const ObjectiveConfig& obj) {
  CheckScores(scores, candidates);
  double modular = 0.0;
  if (!scores.empty()) {
    for (int k : selection) modular += scores[candidates.position(k)];
  }
  const CoverageValues cv =
      ComputeCoverage(selection, candidates, windows, obj.coverage);
  return modular + obj.lambda_cov * cv.f_cov + obj.c_win * cv.f_win;
}

SelectionResult GreedySelect(std::span<const double> scores,
                             const CandidateSet& candidates,
                             const ObjectiveConfig& obj, int budget,
                             int workers) {
  const auto start = Clock::now();
  obj.Validate();
  CheckBudget(budget, candidates.size());
  CheckScores(scores, candidates);

  const WindowList windows = BuildWindows(candidates, obj.coverage);
  CoverageState state = CoverageState::Empty(candidates, windows);
  const std::size_t n = candidates.size();
  std::vector<double> gain(n);

  SelectionResult r;
  r.budget = budget;
  for (int step = 0; step < budget; ++step) {
    ParallelFor(n, workers, [&](std::size_t i) {
      if (state.selected[i]) return;
      const CoverageGain cg = MarginalCoverageGain(
          state, candidates.indices[i], candidates, windows, obj.coverage);
      const double s = scores.empty() ? 0.0 : scores[i];
      gain[i] = s + obj.lambda_cov * cg.cov + obj.c_win * cg.win;
    });
    std::size_t best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (state.selected[i]) continue;
      if (best == n || gain[i] > best_gain) {
        best = i;
        best_gain = gain[i];
      }
    }
    UpdateState(state, candidates.indices[best], candidates, windows,
                obj.coverage);
    r.selected.push_back(candidates.indices[best]);
    r.gains.push_back(best_gain);
  }
  r.objective = ObjectiveValue(r.selected, scores, candidates, windows, obj);
  r.wall_time_s = SecondsSince(start);
  return r;
}

SelectionResult SampleUniform(const CandidateSet& candidates, int budget,
                              std::uint64_t /*seed*/) {
  const auto start = Clock::now();
  CheckBudget(budget, candidates.size());
  SelectionResult r;
  r.sampler = SamplerKind::kUniform;
  r.budget = budget;
  const double last = static_cast<double>(candidates.size() - 1);
  if (budget == 1) {
    r.selected.push_back(
        candidates.indices[static_cast<std::size_t>(std::lround(last / 2.0))]);
  } else {
    for (int j = 0; j < budget; ++j) {
      const long pos = std::lround(j * last / (budget - 1));
      r.selected.push_back(candidates.indices[static_cast<std::size_t>(pos)]);
    }
  }
  r.wall_time_s = SecondsSince(start);
  return r;
}

SelectionResult SampleLossOnly(const CandidateScores& loss_scores,
                               const CandidateSet& candidates, int budget) {
  return TopK(loss_scores, candidates, budget, SamplerKind::kLossOnly);
}

SelectionResult SampleGradOnly(const CandidateScores& grad_scores,
                               const CandidateSet& candidates, int budget) {
  return TopK(grad_scores, candidates, budget, SamplerKind::kGradOnly);
}

SelectionResult SampleCoverageOnly(const CandidateSet& candidates,
                                   const ObjectiveConfig& obj, int budget) {
  SelectionResult r = GreedySelect({}, candidates, obj, budget);
  r.sampler = SamplerKind::kCoverageOnly;
  return r;
}

SelectionResult SampleLossDiv(const CandidateScores& loss_scores,
                              const CandidateSet& candidates,
                              const ObjectiveConfig& obj, int budget) {
  const auto s = MaybeNormalize(loss_scores.scores, obj.normalize_scores);
  SelectionResult r = GreedySelect(s, candidates, obj, budget);
  r.sampler = SamplerKind::kLossDiv;
  return r;
}

SelectionResult SampleGits(const CandidateScores& grad_scores,
                           const CandidateSet& candidates,
                           const ObjectiveConfig& obj, int budget) {
  const auto s = MaybeNormalize(grad_scores.scores, obj.normalize_scores);
  SelectionResult r = GreedySelect(s, candidates, obj, budget);
  r.sampler = SamplerKind::kGits;
  return r;
}

SelectionResult SampleGradMatch(const std::vector<std::vector<double>>& grads,
                                const CandidateSet& candidates, int budget) {
  const auto start = Clock::now();
  CheckBudget(budget, candidates.size());
  Require(grads.size() == candidates.size(), ErrorCode::kShape,
          "gradient list does not match candidate set");
  const std::size_t n = grads.size();
  const std::size_t dim = grads.front().size();
  for (const auto& g : grads) {
    Require(g.size() == dim, ErrorCode::kShape, "gradients differ in length");
  }

  std::vector<double> target(dim, 0.0);
  for (const auto& g : grads) {
    for (std::size_t d = 0; d < dim; ++d) target[d] += g[d];
  }
  for (double& v : target) v /= static_cast<double>(n);

  auto residual = [&](const std::vector<double>& sum, double count) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = target[d] - sum[d] / count;
      sq += diff * diff;
    }
    return std::sqrt(sq);
  };

  SelectionResult r;
  r.sampler = SamplerKind::kGradMatch;
  r.budget = budget;
  std::vector<bool> taken(n, false);
  std::vector<double> sum(dim, 0.0), trial(dim);
  double current = std::sqrt(std::inner_product(target.begin(), target.end(),
                                                target.begin(), 0.0));
  for (int step = 0; step < budget; ++step) {
    std::size_t best = n;
    double best_res = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      for (std::size_t d = 0; d < dim; ++d) trial[d] = sum[d] + grads[i][d];
      const double res = residual(trial, step + 1.0);
      if (best == n || res < best_res) {
        best = i;
        best_res = res;
      }
    }
    taken[best] = true;
    for (std::size_t d = 0; d < dim; ++d) sum[d] += grads[best][d];
    r.selected.push_back(candidates.indices[best]);
    r.gains.push_back(current - best_res);
    current = best_res;
  }
  r.objective = current;
  r.wall_time_s = SecondsSince(start);
  return r;
}

SelectionResult SampleGradMatch(const SurrogateParams& pilot,
                                const CandidateSet& candidates,
                                const TrajectoryDataset& ds,
                                const ScoringConfig& scoring, int budget) {
  const auto start = Clock::now();
  const CandidateGradients g =
      ComputeCandidateGradients(pilot, candidates, ds, scoring);
  SelectionResult r = SampleGradMatch(g.grads, candidates, budget);
  r.wall_time_s = SecondsSince(start);
  return r;
}

nlohmann::json ToJson(const SelectionResult& r) {
  return {{"sampler", std::string(ToString(r.sampler))},
          {"K", r.budget},
          {"selected", r.selected},
          {"gains", r.gains},
          {"objective", r.objective},
          {"wall_time", r.wall_time_s}};
}

SelectionResult SelectionFromJson(const nlohmann::json& j) {
  SelectionResult r;
  try {
    r.sampler = ParseSampler(j.at("sampler").get<std::string>());
    r.budget = j.at("K").get<int>();
    r.selected = j.at("selected").get<std::vector<int>>();
    r.gains = j.value("gains", std::vector<double>{});
    r.objective = j.value("objective", 0.0);
    r.wall_time_s = j.value("wall_time", 0.0);
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kFormat, "malformed selection: " + std::string(e.what()));
  }
  Require(static_cast<int>(r.selected.size()) == r.budget, ErrorCode::kFormat,
          "selection size does not match K");
  return r;
}

void WriteSelectionJson(const SelectionResult& r, const std::string& path,
                        const nlohmann::json& config_echo) {
  nlohmann::json j = ToJson(r);
  if (!config_echo.is_null()) j["config"] = config_echo;
  std::ofstream out(path);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

SelectionResult ReadSelectionJson(const std::string& path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    Throw(ErrorCode::kFormat, "malformed selection file: " +
                                  std::string(e.what()));
  }
  return SelectionFromJson(j);
}

}  // namespace gits
