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

// Synthetic 1D PDE trajectory generation and the on-disk dataset format.
//
// A dataset is a dense 4-D array indexed (trajectory, time, cell, channel),
// stored as normalized 32-bit floats. On disk it is a pair of files:
//   <stem>.json  manifest (dimensions, splits, normalization, format_version)
//   <stem>.f32   little-endian float32 payload in (n, t, cell, channel) order

#ifndef GITS_CORE_PDE_DATA_HPP_
#define GITS_CORE_PDE_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gits {

enum class PdeFamily { kDiffusion1d, kBurgers1d, kAdvectionDiffusion1d };
enum class Boundary { kPeriodic, kNeumann };
enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

std::string_view ToString(PdeFamily f);
std::string_view ToString(Boundary b);
std::string_view ToString(Split s);
PdeFamily ParsePdeFamily(std::string_view s);
Boundary ParseBoundary(std::string_view s);
Split ParseSplit(std::string_view s);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SolverConfig {
  PdeFamily family = PdeFamily::kDiffusion1d;
  int spatial_size = 64;
  int t_count = 101;
  double dt = 1e-3;
  int snapshot_stride = 10;
  // Per-trajectory coefficients are drawn uniformly from these ranges.
  Range diffusivity{2e-3, 1e-2};  // diffusion1d, advection_diffusion1d
  Range viscosity{2e-3, 1e-2};    // burgers1d
  Range speed{-1.0, 1.0};         // advection_diffusion1d
  Boundary boundary = Boundary::kPeriodic;
  std::uint64_t seed = 0;
  int n_modes = 3;

  // Throws kConfig on an unstable time step or an axis too short to host a
  // nonempty candidate set for the given history length.
  void Validate(int history_len = 4) const;
};

struct DatasetDims {
  int n_traj = 0;
  int t_count = 0;
  int spatial_size = 0;
  int channels = 0;

  std::size_t frame_size() const {
    return static_cast<std::size_t>(spatial_size) * channels;
  }
  std::size_t trajectory_size() const { return frame_size() * t_count; }
  std::size_t total_size() const { return trajectory_size() * n_traj; }
};

struct ChannelNorm {
  double mean = 0.0;
  double std = 1.0;
};

// Immutable after construction; safe for concurrent reads.
class TrajectoryDataset {
 public:
  TrajectoryDataset(DatasetDims dims, std::vector<float> data,
                    std::vector<Split> split, std::vector<ChannelNorm> norm,
                    Boundary boundary, std::string family);

  const DatasetDims& dims() const { return dims_; }
  int n_traj() const { return dims_.n_traj; }
  int t_count() const { return dims_.t_count; }
  int spatial_size() const { return dims_.spatial_size; }
  int channels() const { return dims_.channels; }

  // One frame laid out (cell, channel).
  std::span<const float> frame(int n, int t) const;
  std::span<const float> data() const { return data_; }

  Split split(int n) const { return split_[static_cast<std::size_t>(n)]; }
  const std::vector<Split>& splits() const { return split_; }
  std::vector<int> trajectories(Split s) const;

  const std::vector<ChannelNorm>& normalization() const { return norm_; }
  Boundary boundary() const { return boundary_; }
  const std::string& family() const { return family_; }

  bool operator==(const TrajectoryDataset& other) const;

 private:
  DatasetDims dims_;
  std::vector<float> data_;
  std::vector<Split> split_;
  std::vector<ChannelNorm> norm_;
  Boundary boundary_;
  std::string family_;
};

// Un-normalized solver output for one trajectory, (t, cell, channel) order.
struct RawTrajectory {
  int t_count = 0;
  int spatial_size = 0;
  int channels = 1;
  std::vector<double> values;
  double coefficient = 0.0;  // diffusivity or viscosity actually drawn
  double speed = 0.0;

  double at(int t, int cell, int channel = 0) const {
    return values[(static_cast<std::size_t>(t) * spatial_size + cell) *
                      channels +
                  channel];
  }
};

// Integrates trajectory `index` of the dataset described by cfg. Depends only
// on (cfg, index).
RawTrajectory IntegrateTrajectory(const SolverConfig& cfg, int index);

// Deterministic 80/10/10 assignment at trajectory granularity.
std::vector<Split> AssignSplits(int n_traj, std::uint64_t seed);

TrajectoryDataset GenerateDataset(const SolverConfig& cfg, int n_traj,
                                  int workers = 1);

inline constexpr int kDatasetFormatVersion = 1;

// `stem` may be given with or without the ".json" suffix.
void WriteDataset(const TrajectoryDataset& ds, const std::string& stem);
TrajectoryDataset ReadDataset(const std::string& stem);

std::string StripExtension(const std::string& path, std::string_view ext);

}  // namespace gits

#endif  // GITS_CORE_PDE_DATA_HPP_
