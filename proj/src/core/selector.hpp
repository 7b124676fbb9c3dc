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

// Budgeted start-index samplers.
//
// The main selector greedily maximizes
//
//   F(S) = sum_{k in S} s_k + lambda_cov * F_cov(S) + c_win * F_win(S)
//
// under |S| = K. Every baseline is exposed through the same SelectionResult.
// Ties are always broken toward the lowest candidate index.

#ifndef GITS_CORE_SELECTOR_HPP_
#define GITS_CORE_SELECTOR_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/pilot_scoring.hpp"
#include "core/temporal_coverage.hpp"
#include "json.hpp"

namespace gits {

enum class SamplerKind {
  kGits,
  kUniform,
  kLossOnly,
  kCoverageOnly,
  kGradOnly,
  kLossDiv,
  kGradMatch,
};

std::string_view ToString(SamplerKind s);
SamplerKind ParseSampler(std::string_view s);
const std::vector<SamplerKind>& AllSamplers();
bool UsesPilot(SamplerKind s);

struct ObjectiveConfig {
  double lambda_cov = 1.0;
  double c_win = 0.5;
  CoverageConfig coverage;
  // Divides scores by their maximum before use. Off by default.
  bool normalize_scores = false;

  void Validate() const;
};

struct SelectionResult {
  std::vector<int> selected;  // greedy order
  std::vector<double> gains;  // per-step marginal gain; empty for uniform
  // F(S) for objective-driven samplers, sum of scores for top-K samplers,
  // final matching residual for grad_match, 0 for uniform.
  double objective = 0.0;
  SamplerKind sampler = SamplerKind::kGits;
  int budget = 0;
  double wall_time_s = 0.0;
};

// K = max(1, round(ratio * |C|)).
int BudgetFromRatio(double ratio, std::size_t n_candidates);

// From-scratch F(S). An empty score span means all-zero scores.
double ObjectiveValue(std::span<const int> selection,
                      std::span<const double> scores,
                      const CandidateSet& candidates,
                      const WindowList& windows, const ObjectiveConfig& obj);

// Reference greedy. An empty score span means all-zero scores. workers > 1
// evaluates gains concurrently against the frozen state; the result does
// not depend on it.
SelectionResult GreedySelect(std::span<const double> scores,
                             const CandidateSet& candidates,
                             const ObjectiveConfig& obj, int budget,
                             int workers = 1);

SelectionResult SampleUniform(const CandidateSet& candidates, int budget,
                              std::uint64_t seed = 0);
SelectionResult SampleLossOnly(const CandidateScores& loss_scores,
                               const CandidateSet& candidates, int budget);
SelectionResult SampleGradOnly(const CandidateScores& grad_scores,
                               const CandidateSet& candidates, int budget);
SelectionResult SampleCoverageOnly(const CandidateSet& candidates,
                                   const ObjectiveConfig& obj, int budget);
SelectionResult SampleLossDiv(const CandidateScores& loss_scores,
                              const CandidateSet& candidates,
                              const ObjectiveConfig& obj, int budget);
SelectionResult SampleGits(const CandidateScores& grad_scores,
                           const CandidateSet& candidates,
                           const ObjectiveConfig& obj, int budget);

// Greedily minimizes ||g_bar - mean_{j in S} g_j|| where g_bar is the mean
// over all candidates.
SelectionResult SampleGradMatch(const std::vector<std::vector<double>>& grads,
                                const CandidateSet& candidates, int budget);
SelectionResult SampleGradMatch(const SurrogateParams& pilot,
                                const CandidateSet& candidates,
                                const TrajectoryDataset& ds,
                                const ScoringConfig& scoring, int budget);

nlohmann::json ToJson(const SelectionResult& r);
SelectionResult SelectionFromJson(const nlohmann::json& j);
void WriteSelectionJson(const SelectionResult& r, const std::string& path,
                        const nlohmann::json& config_echo = nullptr);
SelectionResult ReadSelectionJson(const std::string& path);

}  // namespace gits

#endif  // GITS_CORE_SELECTOR_HPP_
