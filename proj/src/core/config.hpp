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

// Experiment configuration. Stored as an INI file with the sections
// [dataset], [model], [train], [pilot], [objective], [experiment] and
// [diagnostics]. Unknown keys are rejected so typos surface as config errors.

#ifndef GITS_CORE_CONFIG_HPP_
#define GITS_CORE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/pde_data.hpp"
#include "core/selector.hpp"
#include "core/surrogate.hpp"
#include "core/training.hpp"
#include "json.hpp"

namespace gits {

struct ExperimentConfig {
  // [dataset]
  SolverConfig solver;
  int n_trajectories = 60;
  std::string dataset_path;  // when set, read instead of generating

  // [model]
  SurrogateArch arch;

  // [train]
  TrainConfig train;

  // [pilot]
  int pilot_epochs = 5;
  int horizon = 10;
  int batch_traj = 32;

  // [objective]; zero coverage fields are derived from (T_c, K).
  double lambda_cov = 1.0;
  double c_win = 0.5;
  double tau = 0.0;
  int window_size = 0;
  int window_stride = 0;
  double tau_w = 0.0;
  bool normalize_scores = false;

  // [experiment]
  std::vector<double> ratios = {0.05, 0.10, 0.20};
  std::vector<SamplerKind> samplers = AllSamplers();
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  int workers = 1;
  std::string output_dir = "results";

  // [diagnostics]
  int bins = 10;
  double probe_lr = 1e-3;
  AuxiliaryMetricSpec aux;

  // Throws kConfig on any violated constraint.
  void Validate() const;
};

ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);
std::string DumpConfig(const ExperimentConfig& cfg);

// Sets "section.key" to value, re-validating the result.
void SetConfigValue(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

nlohmann::json ConfigToJson(const ExperimentConfig& cfg);

// Coverage configuration for budget K: derived, then explicit overrides.
CoverageConfig EffectiveCoverage(const ExperimentConfig& cfg, int t_count,
                                 int budget);
ObjectiveConfig EffectiveObjective(const ExperimentConfig& cfg, int t_count,
                                   int budget);

}  // namespace gits

#endif  // GITS_CORE_CONFIG_HPP_
