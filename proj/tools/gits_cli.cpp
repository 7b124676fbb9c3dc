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

// Command-line front end. Exit codes: 0 success, 1 runtime failure or
// failed experiment cells, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gits/gits.h"

namespace {

struct CliError {
  gits_status status;
};

void Check(gits_status st) {
  if (st != GITS_OK) throw CliError{st};
}

int ExitCodeFor(gits_status st) {
  if (st == GITS_OK) return 0;
  return st == GITS_E_CONFIG ? 2 : 1;
}

struct ConfigDeleter {
  void operator()(gits_config* c) const { gits_config_free(c); }
};
struct DatasetDeleter {
  void operator()(gits_dataset* d) const { gits_dataset_free(d); }
};
struct SelectionDeleter {
  void operator()(gits_selection* s) const { gits_selection_free(s); }
};
struct ModelDeleter {
  void operator()(gits_model* m) const { gits_model_free(m); }
};
using ConfigPtr = std::unique_ptr<gits_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<gits_dataset, DatasetDeleter>;
using SelectionPtr = std::unique_ptr<gits_selection, SelectionDeleter>;
using ModelPtr = std::unique_ptr<gits_model, ModelDeleter>;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;  // key=value
  std::optional<unsigned long long> seed;
  std::string dataset;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "INI config file");
  cmd->add_option("--set", o.overrides,
                  "Override a config value, e.g. --set train.epochs_max=20");
}

ConfigPtr LoadConfig(const CommonOptions& o) {
  gits_config* raw = nullptr;
  Check(o.config.empty() ? gits_config_default(&raw)
                         : gits_config_load(o.config.c_str(), &raw));
  ConfigPtr cfg(raw);
  for (const std::string& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n",
                   kv.c_str());
      throw CliError{GITS_E_CONFIG};
    }
    Check(gits_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                          kv.substr(eq + 1).c_str()));
  }
  if (!o.dataset.empty()) {
    Check(gits_config_set(cfg.get(), "dataset.path", o.dataset.c_str()));
  }
  return cfg;
}

DatasetPtr LoadDataset(const gits_config* cfg, const std::string& path) {
  gits_dataset* raw = nullptr;
  Check(path.empty() ? gits_dataset_generate(cfg, &raw)
                     : gits_dataset_read(path.c_str(), &raw));
  return DatasetPtr(raw);
}

void EnsureParent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-informed temporal start-index selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gits_version()));

  CommonOptions gen_o, sel_o, train_o, eval_o, run_o, defaults_o;

  std::string gen_out = "data/dataset";
  auto* gen = app.add_subcommand("generate", "Generate a synthetic PDE dataset");
  AddCommon(gen, gen_o);
  gen->add_option("--output", gen_out, "Output stem (<stem>.json, <stem>.f32)");
  gen->add_option("--seed", gen_o.seed, "Dataset seed override");

  std::string sel_out = "selection.json";
  std::string sel_sampler = "gits";
  double sel_ratio = 0.1;
  auto* sel = app.add_subcommand("select", "Select training start indices");
  AddCommon(sel, sel_o);
  sel->add_option("--dataset", sel_o.dataset, "Dataset stem (generated when omitted)");
  sel->add_option("--sampler", sel_sampler, "Sampler name");
  sel->add_option("--ratio", sel_ratio, "Sampling ratio in (0, 1]");
  sel->add_option("--seed", sel_o.seed, "Pilot seed");
  sel->add_option("--output", sel_out, "Selection JSON path");

  std::string train_sel, train_out = "model";
  auto* train = app.add_subcommand("train", "Train the surrogate on selected starts");
  AddCommon(train, train_o);
  train->add_option("--dataset", train_o.dataset, "Dataset stem");
  train->add_option("--selection", train_sel, "Selection JSON path")->required();
  train->add_option("--seed", train_o.seed, "Training seed");
  train->add_option("--output", train_out, "Checkpoint stem");

  std::string eval_model;
  auto* eval = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
  AddCommon(eval, eval_o);
  eval->add_option("--dataset", eval_o.dataset, "Dataset stem");
  eval->add_option("--model", eval_model, "Checkpoint stem")->required();

  std::string run_out;
  std::vector<std::string> run_samplers;
  bool run_quiet = false;
  auto* run = app.add_subcommand("run", "Run the sampler comparison grid");
  AddCommon(run, run_o);
  run->add_option("--dataset", run_o.dataset, "Dataset stem (generated when omitted)");
  run->add_option("--output", run_out, "Output directory");
  run->add_option("--seed", run_o.seed, "Run a single training seed");
  run->add_option("--sampler", run_samplers, "Restrict to these samplers");
  run->add_flag("--quiet", run_quiet, "Suppress progress output");

  std::optional<std::string> st_suites;
  unsigned long long st_seed = 0;
  auto* st = app.add_subcommand("selftest", "Run the built-in oracle suites");
  st->add_option("--suites", st_suites,
                 "Comma-separated suites (greedy,coverage,submodularity,gradient); "
                 "empty selects none");
  st->add_option("--seed", st_seed, "Seed for the random instances");

  auto* defaults = app.add_subcommand("print-defaults",
                                      "Print the effective configuration");
  AddCommon(defaults, defaults_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ConfigPtr cfg = LoadConfig(gen_o);
      if (gen_o.seed) {
        Check(gits_config_set(cfg.get(), "dataset.seed",
                              std::to_string(*gen_o.seed).c_str()));
      }
      DatasetPtr ds = LoadDataset(cfg.get(), "");
      EnsureParent(gen_out);
      Check(gits_dataset_write(ds.get(), gen_out.c_str()));
      int n = 0, t = 0, x = 0, c = 0;
      Check(gits_dataset_dims(ds.get(), &n, &t, &x, &c));
      std::printf("wrote %s.json (%d trajectories, %d steps, %d cells, %d channels)\n",
                  gen_out.c_str(), n, t, x, c);
      return 0;
    }

    if (sel->parsed()) {
      ConfigPtr cfg = LoadConfig(sel_o);
      DatasetPtr ds = LoadDataset(cfg.get(), sel_o.dataset);
      gits_selection* raw = nullptr;
      Check(gits_select(cfg.get(), ds.get(), sel_sampler.c_str(), sel_ratio,
                        sel_o.seed.value_or(0), &raw));
      SelectionPtr s(raw);
      EnsureParent(sel_out);
      Check(gits_selection_write(s.get(), sel_out.c_str()));
      size_t count = 0;
      Check(gits_selection_indices(s.get(), nullptr, 0, &count));
      std::vector<int> idx(count);
      Check(gits_selection_indices(s.get(), idx.data(), idx.size(), &count));
      std::printf("%s selected %zu starts:", sel_sampler.c_str(), count);
      for (int k : idx) std::printf(" %d", k);
      std::printf("\nwrote %s\n", sel_out.c_str());
      return 0;
    }

    if (train->parsed()) {
      ConfigPtr cfg = LoadConfig(train_o);
      DatasetPtr ds = LoadDataset(cfg.get(), train_o.dataset);
      gits_selection* sraw = nullptr;
      Check(gits_selection_read(train_sel.c_str(), &sraw));
      SelectionPtr s(sraw);
      gits_model* mraw = nullptr;
      Check(gits_train(cfg.get(), ds.get(), s.get(), train_o.seed.value_or(0),
                       &mraw));
      ModelPtr m(mraw);
      EnsureParent(train_out);
      Check(gits_model_write(m.get(), train_out.c_str()));
      std::printf("wrote %s.json\n", train_out.c_str());
      return 0;
    }

    if (eval->parsed()) {
      ConfigPtr cfg = LoadConfig(eval_o);
      DatasetPtr ds = LoadDataset(cfg.get(), eval_o.dataset);
      gits_model* mraw = nullptr;
      Check(gits_model_read(eval_model.c_str(), &mraw));
      ModelPtr m(mraw);
      gits_report r{};
      Check(gits_evaluate(cfg.get(), ds.get(), m.get(), &r));
      std::printf(
          "{\"nrmse\": %.10g, \"crmse\": %.10g, \"brmse\": %.10g, "
          "\"frmse_low\": %.10g, \"frmse_mid\": %.10g, \"frmse_high\": %.10g, "
          "\"horizon\": %d, \"n_test\": %d}\n",
          r.nrmse, r.crmse, r.brmse, r.frmse_low, r.frmse_mid, r.frmse_high,
          r.horizon, r.n_test);
      return 0;
    }

    if (run->parsed()) {
      ConfigPtr cfg = LoadConfig(run_o);
      if (run_o.seed) {
        Check(gits_config_set(cfg.get(), "experiment.seeds",
                              std::to_string(*run_o.seed).c_str()));
      }
      if (!run_samplers.empty()) {
        std::string joined;
        for (const auto& s : run_samplers) joined += (joined.empty() ? "" : ",") + s;
        Check(gits_config_set(cfg.get(), "experiment.samplers", joined.c_str()));
      }
      int failures = 0;
      const gits_status status = gits_run_experiment(
          cfg.get(), run_out.empty() ? nullptr : run_out.c_str(), !run_quiet,
          &failures);
      if (status == GITS_E_CELL_FAILURES) {
        std::fprintf(stderr, "%d cell(s) failed; see summary.json\n", failures);
        return 1;
      }
      Check(status);
      return 0;
    }

    if (st->parsed()) {
      int passed = 0;
      char* text = nullptr;
      Check(gits_selftest(st_suites ? st_suites->c_str() : nullptr, st_seed,
                          &passed, &text));
      std::fputs(text, stdout);
      gits_string_free(text);
      return passed ? 0 : 1;
    }

    if (defaults->parsed()) {
      ConfigPtr cfg = LoadConfig(defaults_o);
      char* text = nullptr;
      Check(gits_config_dump(cfg.get(), &text));
      std::fputs(text, stdout);
      gits_string_free(text);
      return 0;
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error (%s): %s\n", gits_status_string(e.status),
                 gits_last_error());
    return ExitCodeFor(e.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
