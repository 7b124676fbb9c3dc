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

// Fixtures and independent reference computations shared by the unit tests.

#ifndef GITS_TESTS_UNIT_TEST_UTIL_HPP_
#define GITS_TESTS_UNIT_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "core/pde_data.hpp"
#include "core/surrogate.hpp"

namespace gits_test {

inline gits::SolverConfig SmallSolver(std::uint64_t seed = 0) {
  gits::SolverConfig c;
  c.spatial_size = 16;
  c.t_count = 14;
  c.seed = seed;
  return c;
}

inline gits::TrajectoryDataset SmallDataset(std::uint64_t seed = 0,
                                            int n_traj = 10) {
  return gits::GenerateDataset(SmallSolver(seed), n_traj);
}

// Diffusion with zero diffusivity: every frame equals the initial condition.
inline gits::TrajectoryDataset ZeroDynamicsDataset(int n_traj = 10) {
  gits::SolverConfig c = SmallSolver(3);
  c.diffusivity = {0.0, 0.0};
  return gits::GenerateDataset(c, n_traj);
}

inline gits::SurrogateArch TinyArch(const gits::TrajectoryDataset& ds) {
  gits::SurrogateArch a;
  a.hidden = 3;
  a.radius = 1;
  a.padding = gits::PaddingFor(ds.boundary());
  return a;
}

// Every coordinate drawn from U(-scale, scale).
inline gits::SurrogateParams RandomParams(const gits::SurrogateArch& arch,
                                          std::uint64_t seed,
                                          double scale = 0.5) {
  gits::SurrogateParams p = gits::ZeroParams(arch);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  for (double& t : p.theta) t = d(rng);
  return p;
}

inline std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gits_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gits_test

#endif  // GITS_TESTS_UNIT_TEST_UTIL_HPP_
