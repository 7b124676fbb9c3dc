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

// Rollout error metrics and selection diagnostics.

#ifndef GITS_CORE_DIAGNOSTICS_HPP_
#define GITS_CORE_DIAGNOSTICS_HPP_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "core/pde_data.hpp"
#include "core/surrogate.hpp"

namespace gits {

struct CandidateSet;
struct CandidateScores;

// Predicted and reference rollouts, both laid out (traj, step, cell, channel).
struct RolloutFields {
  int n_traj = 0;
  int steps = 0;
  int cells = 0;
  int channels = 1;
  std::vector<double> predicted;
  std::vector<double> truth;

  std::size_t trajectory_size() const {
    return static_cast<std::size_t>(steps) * cells * channels;
  }
};

// Seeds each trajectory of `split` with ground-truth frames 0..L-1 and rolls
// out T_r = T_c - L steps.
RolloutFields CollectRollouts(const SurrogateParams& params,
                              const TrajectoryDataset& ds, Split split);

// Mean over trajectories of sqrt(sum_t ||pred - x||^2 / sum_t ||x||^2).
// Both spans hold n_traj equally sized trajectory blocks.
double RolloutNrmse(std::span<const double> predicted,
                    std::span<const double> truth, int n_traj);
double RolloutNrmse(const RolloutFields& fields);
double RolloutNrmse(const SurrogateParams& params, const TrajectoryDataset& ds,
                    Split split = Split::kTest);

struct AuxiliaryMetricSpec {
  // Inclusive upper mode of the low and mid bands; high takes the rest.
  int low_max_mode = 4;
  int mid_max_mode = 12;
  // Boundary cells for bRMSE; empty selects the first and last cell.
  std::vector<int> boundary_cells;
};

struct AuxiliaryMetrics {
  double crmse = 0.0;
  double brmse = 0.0;
  double frmse_low = 0.0;
  double frmse_mid = 0.0;
  double frmse_high = 0.0;
};

// Unnormalized DFT of a real signal, all N modes:
//   E_m = sum_x e_x exp(-2 pi i m x / N).
std::vector<std::complex<double>> Dft(std::span<const double> signal);

// cRMSE: RMS over (traj, step, channel) of the spatial-mean error.
// bRMSE: RMS of the error on the boundary cells.
// fRMSE: RMS over (traj, step, channel, mode in band) of |E_m| / N for the
//        one-sided modes 0..N/2 of the spatial error.
AuxiliaryMetrics ComputeAuxiliaryMetrics(const RolloutFields& fields,
                                         const AuxiliaryMetricSpec& spec = {});

struct RolloutReport {
  double nrmse = 0.0;
  double crmse = 0.0;
  double brmse = 0.0;
  double frmse_low = 0.0;
  double frmse_mid = 0.0;
  double frmse_high = 0.0;
  int horizon = 0;
  int n_test = 0;
};

RolloutReport EvaluateRollouts(const SurrogateParams& params,
                               const TrajectoryDataset& ds,
                               const AuxiliaryMetricSpec& spec = {},
                               Split split = Split::kTest);

struct GeometryReport {
  int overlap = 0;
  double entropy = 0.0;
  double coverage_frac = 0.0;
  int bins = 10;
};

// Overlap of s1 and s2; entropy and coverage of s1 over `bins` equal-width
// bins spanning [min(C), max(C)]. Entropy is Shannon (natural log) of the
// bin-occupancy histogram divided by ln(bins).
GeometryReport SubsetGeometry(std::span<const int> s1, std::span<const int> s2,
                              const CandidateSet& candidates, int bins = 10);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// Pearson correlation of average ranks. Returns 0 if either input is
// constant.
double SpearmanCorrelation(std::span<const double> a,
                           std::span<const double> b);

struct AlignmentConfig {
  double probe_lr = 1e-3;
  int horizon = 10;
  int batch_traj = 32;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct AlignmentResult {
  std::vector<double> utilities;  // aligned to candidates.indices
  double spearman = 0.0;
};

// utility(k) = valNRMSE(pilot) - valNRMSE(pilot - probe_lr * g_k / ||g_k||).
// A zero gradient leaves the pilot unchanged and yields utility 0.
std::vector<double> ProbeUtilities(const SurrogateParams& pilot,
                                   const std::vector<std::vector<double>>& grads,
                                   const TrajectoryDataset& ds,
                                   double probe_lr, int workers = 1);

AlignmentResult ScoreUtilityAlignment(const SurrogateParams& pilot,
                                      const CandidateScores& scores,
                                      const CandidateSet& candidates,
                                      const TrajectoryDataset& ds,
                                      const AlignmentConfig& cfg = {});

}  // namespace gits

#endif  // GITS_CORE_DIAGNOSTICS_HPP_
