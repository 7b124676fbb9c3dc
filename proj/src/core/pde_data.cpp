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

#include "core/pde_data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "core/common.hpp"
#include "json.hpp"

namespace gits {

using nlohmann::json;

std::string_view ToString(PdeFamily f) {
  switch (f) {
    case PdeFamily::kDiffusion1d:
      return "diffusion1d";
    case PdeFamily::kBurgers1d:
      return "burgers1d";
    case PdeFamily::kAdvectionDiffusion1d:
      return "advection_diffusion1d";
  }
  return "?";
}

std::string_view ToString(Boundary b) {
  return b == Boundary::kPeriodic ? "periodic" : "neumann";
}

std::string_view ToString(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

PdeFamily ParsePdeFamily(std::string_view s) {
  if (s == "diffusion1d") return PdeFamily::kDiffusion1d;
  if (s == "burgers1d") return PdeFamily::kBurgers1d;
  if (s == "advection_diffusion1d") return PdeFamily::kAdvectionDiffusion1d;
  Throw(ErrorCode::kConfig, "unknown PDE family '" + std::string(s) + "'");
}

Boundary ParseBoundary(std::string_view s) {
  if (s == "periodic") return Boundary::kPeriodic;
  if (s == "neumann") return Boundary::kNeumann;
  Throw(ErrorCode::kConfig, "unknown boundary '" + std::string(s) + "'");
}

Split ParseSplit(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  Throw(ErrorCode::kFormat, "unknown split label '" + std::string(s) + "'");
}

void SolverConfig::Validate(int history_len) const {
  Require(spatial_size >= 4, ErrorCode::kConfig, "spatial_size must be >= 4");
  Require(t_count >= history_len + 2, ErrorCode::kConfig,
          "t_count must be >= history_len + 2 for a nonempty candidate set");
  Require(dt > 0.0 && std::isfinite(dt), ErrorCode::kConfig, "dt must be > 0");
  Require(snapshot_stride >= 1, ErrorCode::kConfig,
          "snapshot_stride must be >= 1");
  Require(n_modes >= 1, ErrorCode::kConfig, "n_modes must be >= 1");
  auto check_range = [](const Range& r, const char* name, bool nonneg) {
    Require(r.lo <= r.hi && std::isfinite(r.lo) && std::isfinite(r.hi),
            ErrorCode::kConfig, std::string(name) + " range is invalid");
    if (nonneg) {
      Require(r.lo >= 0.0, ErrorCode::kConfig,
              std::string(name) + " must be non-negative");
    }
  };
  check_range(diffusivity, "diffusivity", true);
  check_range(viscosity, "viscosity", true);
  check_range(speed, "speed", false);

  const double dx = 1.0 / spatial_size;
  // Each Fourier mode has |amplitude| <= 1, and both schemes below obey a
  // discrete maximum principle, so n_modes bounds |u| for all time.
  const double u_max = static_cast<double>(n_modes);
  double courant = 0.0;
  switch (family) {
    case PdeFamily::kDiffusion1d:
      courant = 2.0 * diffusivity.hi * dt / (dx * dx);
      break;
    case PdeFamily::kBurgers1d:
      courant = dt * (u_max / dx + 2.0 * viscosity.hi / (dx * dx));
      break;
    case PdeFamily::kAdvectionDiffusion1d:
      courant = dt * (std::max(std::abs(speed.lo), std::abs(speed.hi)) / dx +
                      2.0 * diffusivity.hi / (dx * dx));
      break;
  }
  if (courant > 1.0) {
    Throw(ErrorCode::kConfig,
          "unstable time step for " + std::string(ToString(family)) +
              ": stability number " + std::to_string(courant) + " > 1");
  }
}

TrajectoryDataset::TrajectoryDataset(DatasetDims dims, std::vector<float> data,
                                     std::vector<Split> split,
                                     std::vector<ChannelNorm> norm,
                                     Boundary boundary, std::string family)
    : dims_(dims),
      data_(std::move(data)),
      split_(std::move(split)),
      norm_(std::move(norm)),
      boundary_(boundary),
      family_(std::move(family)) {
  Require(dims_.n_traj > 0 && dims_.t_count > 0 && dims_.spatial_size > 0 &&
              dims_.channels > 0,
          ErrorCode::kFormat, "dataset dimensions must all be positive");
  Require(data_.size() == dims_.total_size(), ErrorCode::kFormat,
          "dataset payload size does not match dimensions");
  Require(split_.size() == static_cast<std::size_t>(dims_.n_traj),
          ErrorCode::kFormat, "split labels must cover every trajectory");
  Require(norm_.size() == static_cast<std::size_t>(dims_.channels),
          ErrorCode::kFormat, "normalization must cover every channel");
  for (const auto& c : norm_) {
    Require(c.std > 0.0 && std::isfinite(c.std) && std::isfinite(c.mean),
            ErrorCode::kFormat, "normalization std must be finite and > 0");
  }
}

std::span<const float> TrajectoryDataset::frame(int n, int t) const {
  const std::size_t offset =
      static_cast<std::size_t>(n) * dims_.trajectory_size() +
      static_cast<std::size_t>(t) * dims_.frame_size();
  return std::span<const float>(data_).subspan(offset, dims_.frame_size());
}

std::vector<int> TrajectoryDataset::trajectories(Split s) const {
  std::vector<int> out;
  for (int n = 0; n < dims_.n_traj; ++n) {
    if (split_[static_cast<std::size_t>(n)] == s) out.push_back(n);
  }
  return out;
}

bool TrajectoryDataset::operator==(const TrajectoryDataset& o) const {
  if (dims_.n_traj != o.dims_.n_traj || dims_.t_count != o.dims_.t_count ||
      dims_.spatial_size != o.dims_.spatial_size ||
      dims_.channels != o.dims_.channels || split_ != o.split_ ||
      boundary_ != o.boundary_ || family_ != o.family_ ||
      norm_.size() != o.norm_.size()) {
    return false;
  }
  for (std::size_t c = 0; c < norm_.size(); ++c) {
    if (norm_[c].mean != o.norm_[c].mean || norm_[c].std != o.norm_[c].std) {
      return false;
    }
  }
  // Bitwise comparison so that -0.0f and NaN payloads are not conflated.
  return std::equal(data_.begin(), data_.end(), o.data_.begin(),
                    [](float a, float b) {
                      return std::bit_cast<std::uint32_t>(a) ==
                             std::bit_cast<std::uint32_t>(b);
                    });
}

namespace {

// Rusanov (local Lax-Friedrichs) flux at the face between left and right.
template <typename Flux>
double RusanovFlux(double left, double right, Flux&& f, double speed_bound) {
  return 0.5 * (f(left) + f(right)) - 0.5 * speed_bound * (right - left);
}

}  // namespace

RawTrajectory IntegrateTrajectory(const SolverConfig& cfg, int index) {
  const int nx = cfg.spatial_size;
  const double dx = 1.0 / nx;
  std::mt19937_64 rng(DeriveSeed(cfg.seed, "trajectory",
                                 static_cast<std::uint64_t>(index)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<int> wavenumber(1, 4);

  auto draw = [&](const Range& r) { return r.lo + (r.hi - r.lo) * unit(rng); };

  RawTrajectory out;
  out.t_count = cfg.t_count;
  out.spatial_size = nx;
  out.channels = 1;
  switch (cfg.family) {
    case PdeFamily::kDiffusion1d:
      out.coefficient = draw(cfg.diffusivity);
      break;
    case PdeFamily::kBurgers1d:
      out.coefficient = draw(cfg.viscosity);
      break;
    case PdeFamily::kAdvectionDiffusion1d:
      out.coefficient = draw(cfg.diffusivity);
      out.speed = draw(cfg.speed);
      break;
  }

  std::vector<double> u(static_cast<std::size_t>(nx), 0.0);
  for (int m = 0; m < cfg.n_modes; ++m) {
    const double a = amp(rng);
    const int k = wavenumber(rng);
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) * dx;
      u[static_cast<std::size_t>(i)] +=
          a * std::sin(2.0 * std::numbers::pi * k * x + phase);
    }
  }

  // Ghost-extended state: index 0 and nx+1 are ghosts.
  std::vector<double> g(static_cast<std::size_t>(nx) + 2);
  std::vector<double> flux(static_cast<std::size_t>(nx) + 1);
  const double nu = out.coefficient;
  const double c = out.speed;
  const bool periodic = cfg.boundary == Boundary::kPeriodic;

  auto fill_ghosts = [&] {
    std::copy(u.begin(), u.end(), g.begin() + 1);
    if (periodic) {
      g.front() = u.back();
      g.back() = u.front();
    } else {
      g.front() = u.front();
      g.back() = u.back();
    }
  };

  auto step = [&] {
    fill_ghosts();
    if (cfg.family != PdeFamily::kDiffusion1d) {
      for (int f = 0; f <= nx; ++f) {
        const double left = g[static_cast<std::size_t>(f)];
        const double right = g[static_cast<std::size_t>(f) + 1];
        if (cfg.family == PdeFamily::kBurgers1d) {
          flux[static_cast<std::size_t>(f)] = RusanovFlux(
              left, right, [](double v) { return 0.5 * v * v; },
              std::max(std::abs(left), std::abs(right)));
        } else {
          flux[static_cast<std::size_t>(f)] = RusanovFlux(
              left, right, [c](double v) { return c * v; }, std::abs(c));
        }
      }
    }
    const double r = nu * cfg.dt / (dx * dx);
    for (int i = 0; i < nx; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + 1;
      double next = u[static_cast<std::size_t>(i)] +
                    r * (g[j + 1] - 2.0 * g[j] + g[j - 1]);
      if (cfg.family != PdeFamily::kDiffusion1d) {
        next -= cfg.dt / dx *
                (flux[static_cast<std::size_t>(i) + 1] -
                 flux[static_cast<std::size_t>(i)]);
      }
      u[static_cast<std::size_t>(i)] = next;
    }
  };

  out.values.resize(static_cast<std::size_t>(cfg.t_count) * nx);
  for (int t = 0; t < cfg.t_count; ++t) {
    if (t > 0) {
      for (int s = 0; s < cfg.snapshot_stride; ++s) step();
    }
    for (int i = 0; i < nx; ++i) {
      const double v = u[static_cast<std::size_t>(i)];
      if (!std::isfinite(v)) {
        Throw(ErrorCode::kGeneration,
              "non-finite state in trajectory " + std::to_string(index) +
                  " at snapshot " + std::to_string(t));
      }
      out.values[static_cast<std::size_t>(t) * nx + i] = v;
    }
  }
  return out;
}

std::vector<Split> AssignSplits(int n_traj, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(n_traj));
  for (int i = 0; i < n_traj; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(DeriveSeed(seed, "split"));
  std::shuffle(order.begin(), order.end(), rng);
  const int n_val = std::max(1, static_cast<int>(std::lround(0.1 * n_traj)));
  const int n_test = n_val;
  const int n_train = n_traj - n_val - n_test;
  std::vector<Split> split(static_cast<std::size_t>(n_traj), Split::kTrain);
  for (int r = 0; r < n_traj; ++r) {
    const auto n = static_cast<std::size_t>(order[static_cast<std::size_t>(r)]);
    if (r >= n_train + n_val) {
      split[n] = Split::kTest;
    } else if (r >= n_train) {
      split[n] = Split::kVal;
    }
  }
  return split;
}

TrajectoryDataset GenerateDataset(const SolverConfig& cfg, int n_traj,
                                  int workers) {
  cfg.Validate();
  Require(n_traj >= 10, ErrorCode::kConfig, "n_traj must be >= 10");

  std::vector<RawTrajectory> raw(static_cast<std::size_t>(n_traj));
  ParallelFor(raw.size(), workers, [&](std::size_t n) {
    raw[n] = IntegrateTrajectory(cfg, static_cast<int>(n));
  });

  const std::vector<Split> split = AssignSplits(n_traj, cfg.seed);
  DatasetDims dims{n_traj, cfg.t_count, cfg.spatial_size, 1};

  // Statistics over the training split only, accumulated in a fixed order.
  double sum = 0.0;
  std::size_t count = 0;
  for (int n = 0; n < n_traj; ++n) {
    if (split[static_cast<std::size_t>(n)] != Split::kTrain) continue;
    for (double v : raw[static_cast<std::size_t>(n)].values) sum += v;
    count += raw[static_cast<std::size_t>(n)].values.size();
  }
  const double mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for (int n = 0; n < n_traj; ++n) {
    if (split[static_cast<std::size_t>(n)] != Split::kTrain) continue;
    for (double v : raw[static_cast<std::size_t>(n)].values) {
      sq += (v - mean) * (v - mean);
    }
  }
  double std = std::sqrt(sq / static_cast<double>(count));
  if (!(std > 0.0)) std = 1.0;

  std::vector<float> data;
  data.reserve(dims.total_size());
  for (const auto& traj : raw) {
    for (double v : traj.values) {
      data.push_back(static_cast<float>((v - mean) / std));
    }
  }
  return TrajectoryDataset(dims, std::move(data), split, {{mean, std}},
                           cfg.boundary, std::string(ToString(cfg.family)));
}

std::string StripExtension(const std::string& path, std::string_view ext) {
  if (path.size() >= ext.size() &&
      path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size());
  }
  return path;
}

void WriteDataset(const TrajectoryDataset& ds, const std::string& stem_in) {
  const std::string stem = StripExtension(stem_in, ".json");
  const std::filesystem::path payload_path = stem + ".f32";

  json manifest;
  manifest["format_version"] = kDatasetFormatVersion;
  manifest["family"] = ds.family();
  manifest["boundary"] = std::string(ToString(ds.boundary()));
  manifest["n_traj"] = ds.n_traj();
  manifest["t_count"] = ds.t_count();
  manifest["spatial_size"] = ds.spatial_size();
  manifest["channels"] = ds.channels();
  manifest["layout"] = "n,t,cell,channel";
  manifest["dtype"] = "float32-le";
  manifest["payload"] = payload_path.filename().string();
  json split = json::array();
  for (Split s : ds.splits()) split.push_back(std::string(ToString(s)));
  manifest["split"] = split;
  json norm = json::array();
  for (const auto& c : ds.normalization()) {
    norm.push_back({{"mean", c.mean}, {"std", c.std}});
  }
  manifest["normalization"] = norm;

  {
    std::ofstream out(stem + ".json");
    Require(static_cast<bool>(out), ErrorCode::kIo,
            "cannot open " + stem + ".json for writing");
    out << manifest.dump(2) << "\n";
  }
  std::ofstream out(payload_path, std::ios::binary);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + payload_path.string() + " for writing");
  std::vector<unsigned char> bytes(ds.data().size() * 4);
  for (std::size_t i = 0; i < ds.data().size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(ds.data()[i]);
    for (int b = 0; b < 4; ++b) {
      bytes[i * 4 + static_cast<std::size_t>(b)] =
          static_cast<unsigned char>((bits >> (8 * b)) & 0xFFu);
    }
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "failed writing " + payload_path.string());
}

TrajectoryDataset ReadDataset(const std::string& stem_in) {
  const std::string stem = StripExtension(stem_in, ".json");
  std::ifstream in(stem + ".json");
  Require(static_cast<bool>(in), ErrorCode::kIo,
          "cannot open " + stem + ".json");
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    Throw(ErrorCode::kFormat, "malformed dataset manifest: " +
                                  std::string(e.what()));
  }

  DatasetDims dims;
  std::vector<Split> split;
  std::vector<ChannelNorm> norm;
  Boundary boundary = Boundary::kPeriodic;
  std::string family;
  std::string payload_name;
  try {
    const int version = manifest.at("format_version").get<int>();
    Require(version == kDatasetFormatVersion, ErrorCode::kFormat,
            "unsupported dataset format_version " + std::to_string(version));
    dims.n_traj = manifest.at("n_traj").get<int>();
    dims.t_count = manifest.at("t_count").get<int>();
    dims.spatial_size = manifest.at("spatial_size").get<int>();
    dims.channels = manifest.at("channels").get<int>();
    family = manifest.value("family", std::string("unknown"));
    boundary = ParseBoundary(manifest.value("boundary", std::string("periodic")));
    payload_name = manifest.value(
        "payload",
        std::filesystem::path(stem).filename().string() + ".f32");
    for (const auto& s : manifest.at("split")) {
      split.push_back(ParseSplit(s.get<std::string>()));
    }
    for (const auto& c : manifest.at("normalization")) {
      norm.push_back({c.at("mean").get<double>(), c.at("std").get<double>()});
    }
  } catch (const json::exception& e) {
    Throw(ErrorCode::kFormat, "malformed dataset manifest: " +
                                  std::string(e.what()));
  } catch (const Error& e) {
    Throw(ErrorCode::kFormat, e.what());
  }
  Require(dims.n_traj > 0 && dims.t_count > 0 && dims.spatial_size > 0 &&
              dims.channels > 0,
          ErrorCode::kFormat,
          "manifest dimensions must be positive (n_traj, t_count, "
          "spatial_size, channels)");

  const std::filesystem::path payload_path =
      std::filesystem::path(stem).parent_path() / payload_name;
  std::ifstream pin(payload_path, std::ios::binary | std::ios::ate);
  Require(static_cast<bool>(pin), ErrorCode::kIo,
          "cannot open payload " + payload_path.string());
  const auto size = static_cast<std::size_t>(pin.tellg());
  const std::size_t expected = dims.total_size() * 4;
  if (size != expected) {
    Throw(ErrorCode::kFormat,
          "payload length mismatch: manifest implies " +
              std::to_string(expected) + " bytes, file has " +
              std::to_string(size));
  }
  pin.seekg(0);
  std::vector<unsigned char> bytes(size);
  pin.read(reinterpret_cast<char*>(bytes.data()),
           static_cast<std::streamsize>(size));
  Require(static_cast<bool>(pin), ErrorCode::kIo,
          "failed reading " + payload_path.string());
  std::vector<float> data(dims.total_size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(bytes[i * 4 + static_cast<std::size_t>(b)])
              << (8 * b);
    }
    data[i] = std::bit_cast<float>(bits);
  }
  return TrajectoryDataset(dims, std::move(data), std::move(split),
                           std::move(norm), boundary, std::move(family));
}

}  // namespace gits
