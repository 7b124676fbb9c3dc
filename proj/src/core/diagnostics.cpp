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

#include "core/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>

#include "core/common.hpp"
#include "core/pilot_scoring.hpp"

namespace gits {

RolloutFields CollectRollouts(const SurrogateParams& params,
                              const TrajectoryDataset& ds, Split split) {
  const std::vector<int> trajs = ds.trajectories(split);
  Require(!trajs.empty(), ErrorCode::kMetric,
          "split '" + std::string(ToString(split)) + "' has no trajectories");
  const int L = params.arch.history_len;
  const int steps = ds.t_count() - L;
  Require(steps >= 1, ErrorCode::kMetric, "no frames left after the history");

  RolloutFields f;
  f.n_traj = static_cast<int>(trajs.size());
  f.steps = steps;
  f.cells = ds.spatial_size();
  f.channels = ds.channels();
  f.predicted.reserve(f.trajectory_size() * trajs.size());
  f.truth.reserve(f.trajectory_size() * trajs.size());
  std::vector<Frame> history(static_cast<std::size_t>(L));
  for (int n : trajs) {
    for (int l = 0; l < L; ++l) {
      history[static_cast<std::size_t>(l)] = ToFrame(ds.frame(n, l));
    }
    for (const Frame& fr : Rollout(params, history, steps)) {
      f.predicted.insert(f.predicted.end(), fr.begin(), fr.end());
    }
    for (int t = L; t < ds.t_count(); ++t) {
      const auto fr = ds.frame(n, t);
      f.truth.insert(f.truth.end(), fr.begin(), fr.end());
    }
  }
  return f;
}

double RolloutNrmse(std::span<const double> predicted,
                    std::span<const double> truth, int n_traj) {
  Require(n_traj >= 1, ErrorCode::kMetric, "no trajectories to evaluate");
  Require(predicted.size() == truth.size(), ErrorCode::kShape,
          "prediction and truth differ in size");
  Require(truth.size() % static_cast<std::size_t>(n_traj) == 0,
          ErrorCode::kShape, "rollout size is not a multiple of n_traj");
  const std::size_t block = truth.size() / static_cast<std::size_t>(n_traj);
  double total = 0.0;
  for (int n = 0; n < n_traj; ++n) {
    double num = 0.0, den = 0.0;
    const std::size_t off = static_cast<std::size_t>(n) * block;
    for (std::size_t j = off; j < off + block; ++j) {
      const double d = predicted[j] - truth[j];
      num += d * d;
      den += truth[j] * truth[j];
    }
    if (den == 0.0) {
      Throw(ErrorCode::kMetric,
            "zero ground-truth energy in trajectory " + std::to_string(n));
    }
    total += std::sqrt(num / den);
  }
  return total / n_traj;
}

double RolloutNrmse(const RolloutFields& fields) {
  return RolloutNrmse(fields.predicted, fields.truth, fields.n_traj);
}

double RolloutNrmse(const SurrogateParams& params, const TrajectoryDataset& ds,
                    Split split) {
  return RolloutNrmse(CollectRollouts(params, ds, split));
}

std::vector<std::complex<double>> Dft(std::span<const double> signal) {
  const int n = static_cast<int>(signal.size());
  Require(n >= 1, ErrorCode::kShape, "empty DFT input");
  static std::mutex plan_mu;  // FFTW planning is not thread-safe

  double* in = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mu);
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  std::copy(signal.begin(), signal.end(), in);
  fftw_execute(plan);

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n));
  for (int m = 0; m <= n / 2; ++m) {
    spec[static_cast<std::size_t>(m)] = {out[m][0], out[m][1]};
  }
  for (int m = n / 2 + 1; m < n; ++m) {
    spec[static_cast<std::size_t>(m)] =
        std::conj(spec[static_cast<std::size_t>(n - m)]);
  }
  {
    std::lock_guard<std::mutex> lock(plan_mu);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

AuxiliaryMetrics ComputeAuxiliaryMetrics(const RolloutFields& f,
                                         const AuxiliaryMetricSpec& spec) {
  Require(f.predicted.size() == f.truth.size(), ErrorCode::kShape,
          "prediction and truth differ in size");
  Require(f.predicted.size() ==
              f.trajectory_size() * static_cast<std::size_t>(f.n_traj),
          ErrorCode::kShape, "rollout fields do not match their dimensions");
  Require(f.cells >= 1 && f.channels >= 1, ErrorCode::kShape,
          "rollout fields have no cells");

  std::vector<int> boundary = spec.boundary_cells;
  if (boundary.empty()) {
    boundary = {0};
    if (f.cells > 1) boundary.push_back(f.cells - 1);
  }
  for (int b : boundary) {
    Require(b >= 0 && b < f.cells, ErrorCode::kShape,
            "boundary cell out of range");
  }

  const int half = f.cells / 2;
  double c_sum = 0.0, b_sum = 0.0;
  double band_sum[3] = {0.0, 0.0, 0.0};
  std::size_t band_count[3] = {0, 0, 0};
  std::size_t series = 0;
  std::vector<double> err(static_cast<std::size_t>(f.cells));

  for (int n = 0; n < f.n_traj; ++n) {
    for (int t = 0; t < f.steps; ++t) {
      const std::size_t base =
          (static_cast<std::size_t>(n) * f.steps + t) * f.cells * f.channels;
      for (int c = 0; c < f.channels; ++c) {
        double mean = 0.0;
        for (int i = 0; i < f.cells; ++i) {
          const std::size_t j = base + static_cast<std::size_t>(i) * f.channels + c;
          err[static_cast<std::size_t>(i)] = f.predicted[j] - f.truth[j];
          mean += err[static_cast<std::size_t>(i)];
        }
        mean /= f.cells;
        c_sum += mean * mean;
        for (int b : boundary) {
          b_sum += err[static_cast<std::size_t>(b)] * err[static_cast<std::size_t>(b)];
        }
        const auto spec_e = Dft(err);
        for (int m = 0; m <= half; ++m) {
          const int band = m <= spec.low_max_mode   ? 0
                           : m <= spec.mid_max_mode ? 1
                                                    : 2;
          const double mag = std::abs(spec_e[static_cast<std::size_t>(m)]) / f.cells;
          band_sum[band] += mag * mag;
          ++band_count[band];
        }
        ++series;
      }
    }
  }

  AuxiliaryMetrics out;
  if (series == 0) return out;
  out.crmse = std::sqrt(c_sum / static_cast<double>(series));
  out.brmse = std::sqrt(b_sum / static_cast<double>(series * boundary.size()));
  auto band = [&](int b) {
    return band_count[b] == 0
               ? 0.0
               : std::sqrt(band_sum[b] / static_cast<double>(band_count[b]));
  };
  out.frmse_low = band(0);
  out.frmse_mid = band(1);
  out.frmse_high = band(2);
  return out;
}

RolloutReport EvaluateRollouts(const SurrogateParams& params,
                               const TrajectoryDataset& ds,
                               const AuxiliaryMetricSpec& spec, Split split) {
  const RolloutFields fields = CollectRollouts(params, ds, split);
  const AuxiliaryMetrics aux = ComputeAuxiliaryMetrics(fields, spec);
  RolloutReport r;
  r.nrmse = RolloutNrmse(fields);
  r.crmse = aux.crmse;
  r.brmse = aux.brmse;
  r.frmse_low = aux.frmse_low;
  r.frmse_mid = aux.frmse_mid;
  r.frmse_high = aux.frmse_high;
  r.horizon = fields.steps;
  r.n_test = fields.n_traj;
  return r;
}

GeometryReport SubsetGeometry(std::span<const int> s1, std::span<const int> s2,
                              const CandidateSet& candidates, int bins) {
  Require(bins >= 1, ErrorCode::kInvalidArgument, "bins must be >= 1");
  Require(candidates.size() >= 1, ErrorCode::kInvalidArgument,
          "empty candidate set");
  for (int k : s1) candidates.position(k);
  for (int k : s2) candidates.position(k);

  GeometryReport r;
  r.bins = bins;
  const std::set<int> a(s1.begin(), s1.end());
  for (int k : std::set<int>(s2.begin(), s2.end())) r.overlap += a.count(k) ? 1 : 0;

  if (s1.empty()) return r;
  const double lo = candidates.front();
  const double span = candidates.back() - lo;
  std::vector<int> hist(static_cast<std::size_t>(bins), 0);
  for (int k : s1) {
    int b = span > 0.0 ? static_cast<int>(std::floor((k - lo) / span * bins)) : 0;
    b = std::clamp(b, 0, bins - 1);
    ++hist[static_cast<std::size_t>(b)];
  }
  int occupied = 0;
  double h = 0.0;
  for (int count : hist) {
    if (count == 0) continue;
    ++occupied;
    const double p = static_cast<double>(count) / static_cast<double>(s1.size());
    h -= p * std::log(p);
  }
  r.coverage_frac = static_cast<double>(occupied) / bins;
  r.entropy = bins > 1 ? h / std::log(static_cast<double>(bins)) : 0.0;
  return r;
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = r;
    i = j + 1;
  }
  return ranks;
}

double SpearmanCorrelation(std::span<const double> a,
                           std::span<const double> b) {
  Require(a.size() == b.size(), ErrorCode::kShape,
          "Spearman inputs differ in length");
  Require(a.size() >= 2, ErrorCode::kInvalidArgument,
          "Spearman needs at least two points");
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<double> ProbeUtilities(const SurrogateParams& pilot,
                                   const std::vector<std::vector<double>>& grads,
                                   const TrajectoryDataset& ds,
                                   double probe_lr, int workers) {
  Require(probe_lr > 0.0, ErrorCode::kInvalidArgument, "probe_lr must be > 0");
  const double base = RolloutNrmse(pilot, ds, Split::kVal);
  std::vector<double> utility(grads.size(), 0.0);
  ParallelFor(grads.size(), workers, [&](std::size_t i) {
    const auto& g = grads[i];
    Require(g.size() == pilot.theta.size(), ErrorCode::kShape,
            "gradient does not match parameter count");
    double sq = 0.0;
    for (double v : g) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm == 0.0) return;
    SurrogateParams probe = pilot;
    for (std::size_t j = 0; j < g.size(); ++j) {
      probe.theta[j] -= probe_lr * g[j] / norm;
    }
    utility[i] = base - RolloutNrmse(probe, ds, Split::kVal);
  });
  return utility;
}

AlignmentResult ScoreUtilityAlignment(const SurrogateParams& pilot,
                                      const CandidateScores& scores,
                                      const CandidateSet& candidates,
                                      const TrajectoryDataset& ds,
                                      const AlignmentConfig& cfg) {
  Require(candidates.size() >= 3, ErrorCode::kInvalidArgument,
          "score-utility alignment needs at least 3 candidates");
  Require(scores.scores.size() == candidates.size(), ErrorCode::kShape,
          "scores do not match candidate set");
  ScoringConfig sc;
  sc.horizon = cfg.horizon;
  sc.batch_traj = cfg.batch_traj;
  sc.seed = cfg.seed;
  sc.workers = cfg.workers;
  const CandidateGradients g =
      ComputeCandidateGradients(pilot, candidates, ds, sc);
  AlignmentResult r;
  r.utilities = ProbeUtilities(pilot, g.grads, ds, cfg.probe_lr, cfg.workers);
  r.spearman = SpearmanCorrelation(scores.scores, r.utilities);
  return r;
}

}  // namespace gits
