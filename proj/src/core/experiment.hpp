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

// Pipeline stages and the seed-replicated sampler comparison.
//
// Per seed, one pilot is trained and scored; its cost is charged to the
// selection time of every pilot-based cell that reuses it.

#ifndef GITS_CORE_EXPERIMENT_HPP_
#define GITS_CORE_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/pilot_scoring.hpp"
#include "core/report.hpp"

namespace gits {

TrajectoryDataset LoadOrGenerateDataset(const ExperimentConfig& cfg);

// Model architecture for cfg on ds (padding follows the dataset boundary).
SurrogateArch EffectiveArch(const ExperimentConfig& cfg,
                            const TrajectoryDataset& ds);

struct PilotBundle {
  SurrogateParams pilot;
  CandidateScores grad_scores;
  CandidateScores loss_scores;
  std::vector<std::vector<double>> grads;
  double time_s = 0.0;  // pilot training plus scoring
};

PilotBundle BuildPilot(const ExperimentConfig& cfg, const TrajectoryDataset& ds,
                       const CandidateSet& candidates, std::uint64_t seed);

// pilot may be null for samplers that do not use one; it is built on demand
// otherwise.
SelectionResult SelectStarts(const ExperimentConfig& cfg,
                             const TrajectoryDataset& ds, SamplerKind sampler,
                             double ratio, std::uint64_t seed,
                             const PilotBundle* pilot = nullptr);

TrainResult TrainDownstream(const ExperimentConfig& cfg,
                            const TrajectoryDataset& ds,
                            std::span<const int> starts, std::uint64_t seed);

struct ExperimentResult {
  std::vector<CellRecord> cells;  // grid order: ratio, sampler, seed
  ComparisonSummary summary;
  int failures = 0;
};

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const TrajectoryDataset& ds,
                               std::ostream* log = nullptr);

// Writes results.csv, summary.json and summary.txt under cfg.output_dir.
// Returns the number of failed cells.
int RunExperimentToDir(const ExperimentConfig& cfg, std::ostream* log = nullptr);

nlohmann::json SummaryDocument(const ExperimentConfig& cfg,
                               const ExperimentResult& result);

}  // namespace gits

#endif  // GITS_CORE_EXPERIMENT_HPP_
