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

#include "core/pilot_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "core/common.hpp"

namespace gits {

bool CandidateSet::contains(int k) const {
  return std::binary_search(indices.begin(), indices.end(), k);
}

std::size_t CandidateSet::position(int k) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), k);
  if (it == indices.end() || *it != k) {
    Throw(ErrorCode::kInvalidArgument,
          "index " + std::to_string(k) + " is not a candidate");
  }
  return static_cast<std::size_t>(it - indices.begin());
}

CandidateSet BuildCandidates(int t_count, int history_len) {
  Require(history_len >= 1, ErrorCode::kInvalidArgument,
          "history length must be >= 1");
  if (t_count < history_len + 2) {
    Throw(ErrorCode::kInvalidArgument,
          "empty candidate set: t_count " + std::to_string(t_count) +
              " < history_len + 2 = " + std::to_string(history_len + 2));
  }
  CandidateSet c;
  c.t_count = t_count;
  c.history_len = history_len;
  for (int k = history_len; k <= t_count - 2; ++k) c.indices.push_back(k);
  return c;
}

std::string_view ToString(ScoreKind k) {
  return k == ScoreKind::kGradNorm ? "grad_norm" : "rollout_loss";
}

SurrogateParams TrainPilot(const TrajectoryDataset& ds,
                           const CandidateSet& candidates,
                           const SurrogateParams& init, TrainConfig cfg) {
  Require(cfg.epochs_max >= 1, ErrorCode::kConfig,
          "pilot epochs must be >= 1");
  cfg.early_stopping = false;
  return Train(init, candidates.indices, ds, cfg).params;
}

std::vector<int> ScoringSubsample(const TrajectoryDataset& ds, int batch_traj,
                                  std::uint64_t seed) {
  Require(batch_traj >= 1, ErrorCode::kInvalidArgument,
          "batch_traj must be >= 1");
  std::vector<int> train = ds.trajectories(Split::kTrain);
  Require(!train.empty(), ErrorCode::kInvalidArgument,
          "dataset has no training trajectories");
  if (static_cast<int>(train.size()) > batch_traj) {
    std::mt19937_64 rng(DeriveSeed(seed, "scoring_subsample"));
    std::shuffle(train.begin(), train.end(), rng);
    train.resize(static_cast<std::size_t>(batch_traj));
    std::sort(train.begin(), train.end());
  }
  return train;
}

CandidateGradients ComputeCandidateGradients(const SurrogateParams& pilot,
                                             const CandidateSet& candidates,
                                             const TrajectoryDataset& ds,
                                             const ScoringConfig& cfg) {
  Require(cfg.horizon >= 1, ErrorCode::kInvalidArgument,
          "scoring horizon must be >= 1");
  const std::vector<int> subsample =
      ScoringSubsample(ds, cfg.batch_traj, cfg.seed);
  CandidateGradients out;
  out.losses.resize(candidates.size());
  out.grads.resize(candidates.size());
  ParallelFor(candidates.size(), cfg.workers, [&](std::size_t i) {
    std::vector<StartPair> batch;
    batch.reserve(subsample.size());
    for (int n : subsample) batch.push_back({n, candidates.indices[i]});
    LossGrad lg = RolloutLossGrad(pilot, batch, cfg.horizon, ds);
    out.losses[i] = lg.loss;
    out.grads[i] = std::move(lg.grad);
  });
  return out;
}

CandidateScores GradNormScores(const CandidateGradients& g, PilotMeta meta) {
  CandidateScores s{{}, ScoreKind::kGradNorm, meta};
  s.scores.reserve(g.grads.size());
  for (const auto& grad : g.grads) {
    double sq = 0.0;
    for (double v : grad) sq += v * v;
    s.scores.push_back(std::sqrt(sq));
  }
  return s;
}

CandidateScores RolloutLossScores(const CandidateGradients& g, PilotMeta meta) {
  return {g.losses, ScoreKind::kRolloutLoss, meta};
}

CandidateScores ScoreGradNorm(const SurrogateParams& pilot,
                              const CandidateSet& candidates,
                              const TrajectoryDataset& ds,
                              const ScoringConfig& cfg) {
  return GradNormScores(ComputeCandidateGradients(pilot, candidates, ds, cfg),
                        {cfg.pilot_epochs, cfg.horizon, cfg.seed});
}

CandidateScores ScoreRolloutLoss(const SurrogateParams& pilot,
                                 const CandidateSet& candidates,
                                 const TrajectoryDataset& ds,
                                 const ScoringConfig& cfg) {
  return RolloutLossScores(
      ComputeCandidateGradients(pilot, candidates, ds, cfg),
      {cfg.pilot_epochs, cfg.horizon, cfg.seed});
}

void WriteScoresCsv(const CandidateScores& scores,
                    const CandidateSet& candidates, const std::string& path) {
  Require(scores.scores.size() == candidates.size(), ErrorCode::kShape,
          "score vector does not match candidate set");
  std::ofstream out(path);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + path + " for writing");
  out << "k,score,kind,H,E_p,seed\n" << std::setprecision(17);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out << candidates.indices[i] << ',' << scores.scores[i] << ','
        << ToString(scores.kind) << ',' << scores.meta.horizon << ','
        << scores.meta.epochs << ',' << scores.meta.seed << '\n';
  }
}

}  // namespace gits
