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

#include "gits/gits.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <new>
#include <sstream>
#include <string>

#include "core/common.hpp"
#include "core/config.hpp"
#include "core/experiment.hpp"
#include "core/selftest.hpp"

struct gits_config {
  gits::ExperimentConfig cfg;
};

struct gits_dataset {
  explicit gits_dataset(gits::TrajectoryDataset d) : ds(std::move(d)) {}
  gits::TrajectoryDataset ds;
};

struct gits_selection {
  gits::SelectionResult result;
};

struct gits_model {
  gits::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

gits_status Fail(gits_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename F>
gits_status Guard(F&& fn) {
  g_last_error.clear();
  try {
    fn();
    return GITS_OK;
  } catch (const gits::Error& e) {
    return Fail(static_cast<gits_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(GITS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(GITS_E_INTERNAL, e.what());
  }
}

void NotNull(const void* p, const char* name) {
  if (p == nullptr) {
    gits::Throw(gits::ErrorCode::kInvalidArgument,
                std::string(name) + " must not be null");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* gits_version(void) { return "1.0.0"; }

const char* gits_last_error(void) { return g_last_error.c_str(); }

const char* gits_status_string(gits_status status) {
  switch (status) {
    case GITS_OK:
      return "ok";
    case GITS_E_INVALID_ARGUMENT:
      return "invalid argument";
    case GITS_E_CONFIG:
      return "config error";
    case GITS_E_IO:
      return "I/O error";
    case GITS_E_FORMAT:
      return "format error";
    case GITS_E_SHAPE:
      return "shape mismatch";
    case GITS_E_GENERATION:
      return "data generation failed";
    case GITS_E_DIVERGENCE:
      return "training diverged";
    case GITS_E_METRIC:
      return "metric undefined";
    case GITS_E_CELL_FAILURES:
      return "experiment cells failed";
    case GITS_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void gits_string_free(char* s) { std::free(s); }

gits_status gits_config_default(gits_config** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new gits_config();
  });
}

gits_status gits_config_load(const char* path, gits_config** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new gits_config{gits::LoadConfig(path)};
  });
}

gits_status gits_config_parse(const char* text, gits_config** out) {
  return Guard([&] {
    NotNull(text, "text");
    NotNull(out, "out");
    *out = new gits_config{gits::ParseConfig(text)};
  });
}

gits_status gits_config_set(gits_config* cfg, const char* key,
                            const char* value) {
  return Guard([&] {
    NotNull(cfg, "cfg");
    NotNull(key, "key");
    NotNull(value, "value");
    gits::SetConfigValue(cfg->cfg, key, value);
  });
}

gits_status gits_config_dump(const gits_config* cfg, char** out_text) {
  return Guard([&] {
    NotNull(cfg, "cfg");
    NotNull(out_text, "out_text");
    *out_text = CopyString(gits::DumpConfig(cfg->cfg));
  });
}

void gits_config_free(gits_config* cfg) { delete cfg; }

gits_status gits_dataset_generate(const gits_config* cfg, gits_dataset** out) {
  return Guard([&] {
    NotNull(cfg, "cfg");
    NotNull(out, "out");
    gits::ExperimentConfig c = cfg->cfg;
    c.dataset_path.clear();
    *out = new gits_dataset(gits::LoadOrGenerateDataset(c));
  });
}

gits_status gits_dataset_read(const char* stem, gits_dataset** out) {
  return Guard([&] {
    NotNull(stem, "stem");
    NotNull(out, "out");
    *out = new gits_dataset(
        gits::ReadDataset(gits::StripExtension(stem, ".json")));
  });
}

gits_status gits_dataset_write(const gits_dataset* ds, const char* stem) {
  return Guard([&] {
    NotNull(ds, "ds");
    NotNull(stem, "stem");
    gits::WriteDataset(ds->ds, gits::StripExtension(stem, ".json"));
  });
}

gits_status gits_dataset_dims(const gits_dataset* ds, int* n_traj,
                              int* t_count, int* spatial_size, int* channels) {
  return Guard([&] {
    NotNull(ds, "ds");
    if (n_traj) *n_traj = ds->ds.n_traj();
    if (t_count) *t_count = ds->ds.t_count();
    if (spatial_size) *spatial_size = ds->ds.spatial_size();
    if (channels) *channels = ds->ds.channels();
  });
}

void gits_dataset_free(gits_dataset* ds) { delete ds; }

gits_status gits_select(const gits_config* cfg, const gits_dataset* ds,
                        const char* sampler, double ratio, uint64_t seed,
                        gits_selection** out) {
  return Guard([&] {
    NotNull(cfg, "cfg");
    NotNull(ds, "ds");
    NotNull(sampler, "sampler");
    NotNull(out, "out");
    *out = new gits_selection{gits::SelectStarts(
        cfg->cfg, ds->ds, gits::ParseSampler(sampler), ratio, seed)};
  });
}

gits_status gits_selection_indices(const gits_selection* sel, int* out,
                                   size_t capacity, size_t* count) {
  return Guard([&] {
    NotNull(sel, "sel");
    const auto& s = sel->result.selected;
    if (count) *count = s.size();
    if (out == nullptr) return;
    for (size_t i = 0; i < s.size() && i < capacity; ++i) out[i] = s[i];
  });
}

gits_status gits_selection_objective(const gits_selection* sel, double* out) {
  return Guard([&] {
    NotNull(sel, "sel");
    NotNull(out, "out");
    *out = sel->result.objective;
  });
}

gits_status gits_selection_write(const gits_selection* sel, const char* path) {
  return Guard([&] {
    NotNull(sel, "sel");
    NotNull(path, "path");
    gits::WriteSelectionJson(sel->result, path);
  });
}

gits_status gits_selection_read(const char* path, gits_selection** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new gits_selection{gits::ReadSelectionJson(path)};
  });
}

void gits_selection_free(gits_selection* sel) { delete sel; }

gits_status gits_train(const gits_config* cfg, const gits_dataset* ds,
                       const gits_selection* sel, uint64_t seed,
                       gits_model** out) {
  return Guard([&] {
    NotNull(cfg, "cfg");
    NotNull(ds, "ds");
    NotNull(sel, "sel");
    NotNull(out, "out");
    const gits::TrainResult tr =
        gits::TrainDownstream(cfg->cfg, ds->ds, sel->result.selected, seed);
    *out = new gits_model{gits::Checkpoint{tr.params, seed, tr.best_epoch}};
  });
}

gits_status gits_model_param_count(const gits_model* model, size_t* out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(out, "out");
    *out = model->ckpt.params.theta.size();
  });
}

gits_status gits_model_write(const gits_model* model, const char* stem) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(stem, "stem");
    gits::WriteCheckpoint(model->ckpt, gits::StripExtension(stem, ".json"));
  });
}

gits_status gits_model_read(const char* stem, gits_model** out) {
  return Guard([&] {
    NotNull(stem, "stem");
    NotNull(out, "out");
    *out = new gits_model{
        gits::ReadCheckpoint(gits::StripExtension(stem, ".json"))};
  });
}

void gits_model_free(gits_model* model) { delete model; }

gits_status gits_evaluate(const gits_config* cfg, const gits_dataset* ds,
                          const gits_model* model, gits_report* out) {
  return Guard([&] {
    NotNull(cfg, "cfg");
    NotNull(ds, "ds");
    NotNull(model, "model");
    NotNull(out, "out");
    const gits::RolloutReport r = gits::EvaluateRollouts(
        model->ckpt.params, ds->ds, cfg->cfg.aux, gits::Split::kTest);
    *out = gits_report{r.nrmse,     r.crmse,     r.brmse,   r.frmse_low,
                       r.frmse_mid, r.frmse_high, r.horizon, r.n_test};
  });
}

gits_status gits_run_experiment(const gits_config* cfg, const char* output_dir,
                                int verbose, int* failures) {
  int code = 0;
  const gits_status st = Guard([&] {
    NotNull(cfg, "cfg");
    gits::ExperimentConfig c = cfg->cfg;
    if (output_dir != nullptr) c.output_dir = output_dir;
    code = gits::RunExperimentToDir(c, verbose ? &std::cerr : nullptr);
  });
  if (st != GITS_OK) return st;
  if (failures) *failures = code;
  if (code != 0) {
    return Fail(GITS_E_CELL_FAILURES, "one or more experiment cells failed");
  }
  return GITS_OK;
}

gits_status gits_selftest(const char* suites, uint64_t seed, int* passed,
                          char** report_text) {
  return Guard([&] {
    std::vector<std::string> names;
    if (suites == nullptr) {
      names = gits::SelftestSuiteNames();
    } else {
      std::stringstream ss(suites);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) names.push_back(item);
      }
    }
    const gits::SelftestReport r = gits::RunSelftest(names, seed);
    if (passed) *passed = r.passed() ? 1 : 0;
    if (report_text) *report_text = CopyString(r.Text());
  });
}

}  // extern "C"
