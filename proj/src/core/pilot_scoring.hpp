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

// Candidate start construction, pilot training and per-candidate scores.

#ifndef GITS_CORE_PILOT_SCORING_HPP_
#define GITS_CORE_PILOT_SCORING_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/pde_data.hpp"
#include "core/surrogate.hpp"
#include "core/training.hpp"

namespace gits {

struct CandidateSet {
  std::vector<int> indices;  // strictly increasing
  int t_count = 0;
  int history_len = 0;

  std::size_t size() const { return indices.size(); }
  int front() const { return indices.front(); }
  int back() const { return indices.back(); }
  bool contains(int k) const;
  // Position of k in indices; throws kInvalidArgument if absent.
  std::size_t position(int k) const;
};

// {k : L <= k <= T_c - 2}.
CandidateSet BuildCandidates(int t_count, int history_len);

enum class ScoreKind { kGradNorm, kRolloutLoss };
std::string_view ToString(ScoreKind k);

struct PilotMeta {
  int epochs = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
};

struct CandidateScores {
  std::vector<double> scores;  // aligned to CandidateSet::indices
  ScoreKind kind = ScoreKind::kGradNorm;
  PilotMeta meta;
};

struct ScoringConfig {
  int horizon = 10;
  int batch_traj = 32;
  std::uint64_t seed = 0;  // picks the trajectory subsample
  int pilot_epochs = 5;    // provenance only
  int workers = 1;
};

// Trains on every candidate start for exactly cfg.epochs_max epochs (no
// early stopping) and returns the final parameters.
SurrogateParams TrainPilot(const TrajectoryDataset& ds,
                           const CandidateSet& candidates,
                           const SurrogateParams& init, TrainConfig cfg);

// Fixed, sorted subsample of min(batch_traj, |train|) training trajectories.
std::vector<int> ScoringSubsample(const TrajectoryDataset& ds, int batch_traj,
                                  std::uint64_t seed);

struct CandidateGradients {
  std::vector<double> losses;              // l_k
  std::vector<std::vector<double>> grads;  // g_k
};

// (l_k, g_k) for every candidate over the shared trajectory subsample.
CandidateGradients ComputeCandidateGradients(const SurrogateParams& pilot,
                                             const CandidateSet& candidates,
                                             const TrajectoryDataset& ds,
                                             const ScoringConfig& cfg);

CandidateScores GradNormScores(const CandidateGradients& g, PilotMeta meta);
CandidateScores RolloutLossScores(const CandidateGradients& g, PilotMeta meta);

CandidateScores ScoreGradNorm(const SurrogateParams& pilot,
                              const CandidateSet& candidates,
                              const TrajectoryDataset& ds,
                              const ScoringConfig& cfg);
CandidateScores ScoreRolloutLoss(const SurrogateParams& pilot,
                                 const CandidateSet& candidates,
                                 const TrajectoryDataset& ds,
                                 const ScoringConfig& cfg);

// CSV columns: k,score,kind,H,E_p,seed
void WriteScoresCsv(const CandidateScores& scores,
                    const CandidateSet& candidates, const std::string& path);

}  // namespace gits

#endif  // GITS_CORE_PILOT_SCORING_HPP_
