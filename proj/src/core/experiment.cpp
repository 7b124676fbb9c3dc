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

#include "core/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

#include "core/common.hpp"

namespace gits {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool AnyPilotSampler(const std::vector<SamplerKind>& samplers) {
  for (SamplerKind s : samplers) {
    if (UsesPilot(s)) return true;
  }
  return false;
}

}  // namespace

TrajectoryDataset LoadOrGenerateDataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset_path.empty()) {
    return ReadDataset(StripExtension(cfg.dataset_path, ".json"));
  }
  return GenerateDataset(cfg.solver, cfg.n_trajectories, cfg.workers);
}

SurrogateArch EffectiveArch(const ExperimentConfig& cfg,
                            const TrajectoryDataset& ds) {
  SurrogateArch arch = cfg.arch;
  arch.channels = ds.channels();
  arch.padding = PaddingFor(ds.boundary());
  arch.clamp = cfg.train.clamp;
  arch.Validate();
  return arch;
}

PilotBundle BuildPilot(const ExperimentConfig& cfg, const TrajectoryDataset& ds,
                       const CandidateSet& candidates, std::uint64_t seed) {
  const auto start = Clock::now();
  const SurrogateArch arch = EffectiveArch(cfg, ds);
  TrainConfig tc = cfg.train;
  tc.epochs_max = cfg.pilot_epochs;
  tc.seed = DeriveSeed(seed, "pilot_train");

  PilotBundle b;
  b.pilot = TrainPilot(ds, candidates, InitParams(arch, DeriveSeed(seed, "pilot")),
                       tc);
  ScoringConfig sc;
  sc.horizon = cfg.horizon;
  sc.batch_traj = cfg.batch_traj;
  sc.seed = seed;
  sc.pilot_epochs = cfg.pilot_epochs;
  sc.workers = cfg.workers;
  CandidateGradients g = ComputeCandidateGradients(b.pilot, candidates, ds, sc);
  const PilotMeta meta{cfg.pilot_epochs, cfg.horizon, seed};
  b.grad_scores = GradNormScores(g, meta);
  b.loss_scores = RolloutLossScores(g, meta);
  b.grads = std::move(g.grads);
  b.time_s = SecondsSince(start);
  return b;
}

SelectionResult SelectStarts(const ExperimentConfig& cfg,
                             const TrajectoryDataset& ds, SamplerKind sampler,
                             double ratio, std::uint64_t seed,
                             const PilotBundle* pilot) {
  const CandidateSet candidates =
      BuildCandidates(ds.t_count(), cfg.arch.history_len);
  const int budget = BudgetFromRatio(ratio, candidates.size());
  const ObjectiveConfig obj = EffectiveObjective(cfg, ds.t_count(), budget);

  std::unique_ptr<PilotBundle> owned;
  if (UsesPilot(sampler) && pilot == nullptr) {
    owned = std::make_unique<PilotBundle>(BuildPilot(cfg, ds, candidates, seed));
    pilot = owned.get();
  }

  switch (sampler) {
    case SamplerKind::kGits:
      return SampleGits(pilot->grad_scores, candidates, obj, budget);
    case SamplerKind::kUniform:
      return SampleUniform(candidates, budget, seed);
    case SamplerKind::kLossOnly:
      return SampleLossOnly(pilot->loss_scores, candidates, budget);
    case SamplerKind::kCoverageOnly:
      return SampleCoverageOnly(candidates, obj, budget);
    case SamplerKind::kGradOnly:
      return SampleGradOnly(pilot->grad_scores, candidates, budget);
    case SamplerKind::kLossDiv:
      return SampleLossDiv(pilot->loss_scores, candidates, obj, budget);
    case SamplerKind::kGradMatch:
      return SampleGradMatch(pilot->grads, candidates, budget);
  }
  Throw(ErrorCode::kInternal, "unhandled sampler");
}

TrainResult TrainDownstream(const ExperimentConfig& cfg,
                            const TrajectoryDataset& ds,
                            std::span<const int> starts, std::uint64_t seed) {
  const SurrogateArch arch = EffectiveArch(cfg, ds);
  TrainConfig tc = cfg.train;
  tc.seed = DeriveSeed(seed, "train_shuffle");
  return Train(InitParams(arch, DeriveSeed(seed, "train")), starts, ds, tc);
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const TrajectoryDataset& ds, std::ostream* log) {
  cfg.Validate();
  std::mutex log_mu;
  auto note = [&](const std::string& msg) {
    if (log == nullptr) return;
    std::lock_guard<std::mutex> lock(log_mu);
    *log << msg << std::endl;
  };

  const CandidateSet candidates =
      BuildCandidates(ds.t_count(), cfg.arch.history_len);

  std::map<std::uint64_t, PilotBundle> pilots;
  std::map<std::uint64_t, std::string> pilot_errors;
  if (AnyPilotSampler(cfg.samplers)) {
    for (std::uint64_t seed : cfg.seeds) {
      if (pilots.count(seed) || pilot_errors.count(seed)) continue;
      try {
        pilots.emplace(seed, BuildPilot(cfg, ds, candidates, seed));
        note("pilot seed=" + std::to_string(seed) + " ready in " +
             std::to_string(pilots.at(seed).time_s) + " s");
      } catch (const Error& e) {
        pilot_errors[seed] = std::string("pilot: ") + e.what();
        note("pilot seed=" + std::to_string(seed) + " failed: " + e.what());
      }
    }
  }

  ExperimentResult result;
  for (double ratio : cfg.ratios) {
    for (SamplerKind sampler : cfg.samplers) {
      for (std::uint64_t seed : cfg.seeds) {
        CellRecord c;
        c.dataset = ds.family();
        c.sampler = sampler;
        c.ratio = ratio;
        c.seed = seed;
        c.budget = BudgetFromRatio(ratio, candidates.size());
        result.cells.push_back(std::move(c));
      }
    }
  }

  ParallelFor(result.cells.size(), cfg.workers, [&](std::size_t i) {
    CellRecord& c = result.cells[i];
    try {
      const PilotBundle* pilot = nullptr;
      if (UsesPilot(c.sampler)) {
        const auto err = pilot_errors.find(c.seed);
        if (err != pilot_errors.end()) Throw(ErrorCode::kDivergence, err->second);
        pilot = &pilots.at(c.seed);
      }
      const auto t0 = Clock::now();
      const SelectionResult sel =
          SelectStarts(cfg, ds, c.sampler, c.ratio, c.seed, pilot);
      c.selection_time_s = SecondsSince(t0) + (pilot ? pilot->time_s : 0.0);
      c.selected = sel.selected;

      const auto t1 = Clock::now();
      const TrainResult tr = TrainDownstream(cfg, ds, sel.selected, c.seed);
      c.train_time_s = SecondsSince(t1);

      c.report = EvaluateRollouts(tr.params, ds, cfg.aux, Split::kTest);
      note("cell ratio=" + RatioKey(c.ratio) + " sampler=" +
           std::string(ToString(c.sampler)) + " seed=" +
           std::to_string(c.seed) + " nrmse=" + std::to_string(c.report.nrmse));
    } catch (const Error& e) {
      c.ok = false;
      c.error = std::string(ToString(e.code())) + ": " + e.what();
      note("cell ratio=" + RatioKey(c.ratio) + " sampler=" +
           std::string(ToString(c.sampler)) + " seed=" +
           std::to_string(c.seed) + " FAILED: " + e.what());
    }
  });

  for (const CellRecord& c : result.cells) result.failures += c.ok ? 0 : 1;
  result.summary = CompareReport(result.cells);
  return result;
}

nlohmann::json SummaryDocument(const ExperimentConfig& cfg,
                               const ExperimentResult& result) {
  nlohmann::json doc = SummaryToJson(result.summary);
  doc["config_echo"] = ConfigToJson(cfg);
  nlohmann::json cells = nlohmann::json::array();
  for (const CellRecord& c : result.cells) cells.push_back(CellToJson(c));
  doc["cells"] = cells;
  doc["failures"] = result.failures;
  return doc;
}

int RunExperimentToDir(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.Validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    Throw(ErrorCode::kIo,
          "cannot create output directory " + cfg.output_dir + ": " + ec.message());
  }
  const TrajectoryDataset ds = LoadOrGenerateDataset(cfg);
  const ExperimentResult result = RunExperiment(cfg, ds, log);

  const std::filesystem::path dir(cfg.output_dir);
  WriteResultsCsv(result.cells, (dir / "results.csv").string());
  {
    const std::string path = (dir / "summary.json").string();
    std::ofstream out(path);
    Require(static_cast<bool>(out), ErrorCode::kIo,
            "cannot open " + path + " for writing");
    out << SummaryDocument(cfg, result).dump(2) << "\n";
  }
  {
    const std::string path = (dir / "summary.txt").string();
    std::ofstream out(path);
    Require(static_cast<bool>(out), ErrorCode::kIo,
            "cannot open " + path + " for writing");
    out << SummaryTable(result.summary);
  }
  if (log) *log << SummaryTable(result.summary);
  return result.failures;
}

}  // namespace gits
