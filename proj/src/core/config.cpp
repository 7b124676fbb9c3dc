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

#include "core/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/common.hpp"

namespace gits {

namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& key, const std::string& s) {
  double v = 0.0;
  const std::string t = Trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    Throw(ErrorCode::kConfig, key + ": expected a number, got '" + s + "'");
  }
  return v;
}

long long ParseInt(const std::string& key, const std::string& s) {
  long long v = 0;
  const std::string t = Trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    Throw(ErrorCode::kConfig, key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t ParseSeed(const std::string& key, const std::string& s) {
  const long long v = ParseInt(key, s);
  Require(v >= 0, ErrorCode::kConfig, key + ": seeds must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool ParseBool(const std::string& key, const std::string& s) {
  const std::string t = Trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  Throw(ErrorCode::kConfig, key + ": expected true/false, got '" + s + "'");
}

template <typename T, typename F>
std::string JoinList(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt(v[i]);
  }
  return out;
}

struct Field {
  const char* key;  // "section.name"
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define GITS_INT_FIELD(KEY, MEMBER)                                      \
  Field {                                                                \
    KEY, [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }, \
        [](ExperimentConfig& c, const std::string& v) {                  \
          c.MEMBER = static_cast<decltype(c.MEMBER)>(ParseInt(KEY, v));  \
        }                                                                \
  }
#define GITS_DOUBLE_FIELD(KEY, MEMBER)                                   \
  Field {                                                                \
    KEY, [](const ExperimentConfig& c) { return FormatDouble(c.MEMBER); }, \
        [](ExperimentConfig& c, const std::string& v) {                  \
          c.MEMBER = ParseDouble(KEY, v);                                \
        }                                                                \
  }
#define GITS_BOOL_FIELD(KEY, MEMBER)                                     \
  Field {                                                                \
    KEY,                                                                 \
        [](const ExperimentConfig& c) {                                  \
          return std::string(c.MEMBER ? "true" : "false");               \
        },                                                               \
        [](ExperimentConfig& c, const std::string& v) {                  \
          c.MEMBER = ParseBool(KEY, v);                                  \
        }                                                                \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      Field{"dataset.family",
            [](const ExperimentConfig& c) {
              return std::string(ToString(c.solver.family));
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.solver.family = ParsePdeFamily(Trim(v));
            }},
      Field{"dataset.boundary",
            [](const ExperimentConfig& c) {
              return std::string(ToString(c.solver.boundary));
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.solver.boundary = ParseBoundary(Trim(v));
            }},
      GITS_INT_FIELD("dataset.n_trajectories", n_trajectories),
      GITS_INT_FIELD("dataset.spatial_size", solver.spatial_size),
      GITS_INT_FIELD("dataset.t_count", solver.t_count),
      GITS_DOUBLE_FIELD("dataset.dt", solver.dt),
      GITS_INT_FIELD("dataset.snapshot_stride", solver.snapshot_stride),
      GITS_DOUBLE_FIELD("dataset.diffusivity_min", solver.diffusivity.lo),
      GITS_DOUBLE_FIELD("dataset.diffusivity_max", solver.diffusivity.hi),
      GITS_DOUBLE_FIELD("dataset.viscosity_min", solver.viscosity.lo),
      GITS_DOUBLE_FIELD("dataset.viscosity_max", solver.viscosity.hi),
      GITS_DOUBLE_FIELD("dataset.speed_min", solver.speed.lo),
      GITS_DOUBLE_FIELD("dataset.speed_max", solver.speed.hi),
      GITS_INT_FIELD("dataset.n_modes", solver.n_modes),
      Field{"dataset.seed",
            [](const ExperimentConfig& c) {
              return std::to_string(c.solver.seed);
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.solver.seed = ParseSeed("dataset.seed", v);
            }},
      Field{"dataset.path",
            [](const ExperimentConfig& c) { return c.dataset_path; },
            [](ExperimentConfig& c, const std::string& v) {
              c.dataset_path = Trim(v);
            }},

      GITS_INT_FIELD("model.history_len", arch.history_len),
      GITS_INT_FIELD("model.hidden", arch.hidden),
      GITS_INT_FIELD("model.radius", arch.radius),

      GITS_DOUBLE_FIELD("train.lr", train.lr),
      GITS_INT_FIELD("train.epochs_max", train.epochs_max),
      GITS_INT_FIELD("train.batch_size", train.batch_size),
      GITS_DOUBLE_FIELD("train.grad_clip", train.grad_clip),
      GITS_DOUBLE_FIELD("train.clamp", train.clamp),
      GITS_INT_FIELD("train.min_epochs", train.min_epochs),
      GITS_INT_FIELD("train.patience", train.patience),
      GITS_BOOL_FIELD("train.early_stopping", train.early_stopping),

      GITS_INT_FIELD("pilot.epochs", pilot_epochs),
      GITS_INT_FIELD("pilot.horizon", horizon),
      GITS_INT_FIELD("pilot.batch_traj", batch_traj),

      GITS_DOUBLE_FIELD("objective.lambda_cov", lambda_cov),
      GITS_DOUBLE_FIELD("objective.c_win", c_win),
      GITS_DOUBLE_FIELD("objective.tau", tau),
      GITS_INT_FIELD("objective.window_size", window_size),
      GITS_INT_FIELD("objective.window_stride", window_stride),
      GITS_DOUBLE_FIELD("objective.tau_w", tau_w),
      GITS_BOOL_FIELD("objective.normalize_scores", normalize_scores),

      Field{"experiment.ratios",
            [](const ExperimentConfig& c) {
              return JoinList(c.ratios, FormatDouble);
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.ratios.clear();
              for (const auto& s : SplitList(v)) {
                c.ratios.push_back(ParseDouble("experiment.ratios", s));
              }
            }},
      Field{"experiment.samplers",
            [](const ExperimentConfig& c) {
              return JoinList(c.samplers, [](SamplerKind k) {
                return std::string(ToString(k));
              });
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.samplers.clear();
              for (const auto& s : SplitList(v)) {
                c.samplers.push_back(ParseSampler(s));
              }
            }},
      Field{"experiment.seeds",
            [](const ExperimentConfig& c) {
              return JoinList(c.seeds,
                              [](std::uint64_t s) { return std::to_string(s); });
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.seeds.clear();
              for (const auto& s : SplitList(v)) {
                c.seeds.push_back(ParseSeed("experiment.seeds", s));
              }
            }},
      GITS_INT_FIELD("experiment.workers", workers),
      Field{"experiment.output_dir",
            [](const ExperimentConfig& c) { return c.output_dir; },
            [](ExperimentConfig& c, const std::string& v) {
              c.output_dir = Trim(v);
            }},

      GITS_INT_FIELD("diagnostics.bins", bins),
      GITS_DOUBLE_FIELD("diagnostics.probe_lr", probe_lr),
      GITS_INT_FIELD("diagnostics.low_max_mode", aux.low_max_mode),
      GITS_INT_FIELD("diagnostics.mid_max_mode", aux.mid_max_mode),
  };
  return fields;
}

#undef GITS_INT_FIELD
#undef GITS_DOUBLE_FIELD
#undef GITS_BOOL_FIELD

const Field& FindField(const std::string& key) {
  for (const Field& f : Fields()) {
    if (key == f.key) return f;
  }
  Throw(ErrorCode::kConfig, "unknown config key '" + key + "'");
}

void ApplyField(ExperimentConfig& cfg, const std::string& key,
                const std::string& value) {
  const Field& f = FindField(key);
  try {
    f.set(cfg, value);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Throw(ErrorCode::kConfig, key + ": " + e.what());
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  try {
    Require(n_trajectories >= 10, ErrorCode::kConfig,
            "dataset.n_trajectories must be >= 10");
    if (dataset_path.empty()) solver.Validate(arch.history_len);
    arch.Validate();
    train.Validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Throw(ErrorCode::kConfig, e.what());
  }
  Require(pilot_epochs >= 1, ErrorCode::kConfig, "pilot.epochs must be >= 1");
  Require(horizon >= 1, ErrorCode::kConfig, "pilot.horizon must be >= 1");
  Require(batch_traj >= 1, ErrorCode::kConfig, "pilot.batch_traj must be >= 1");
  Require(lambda_cov >= 0.0, ErrorCode::kConfig,
          "objective.lambda_cov must be >= 0");
  Require(c_win >= 0.0, ErrorCode::kConfig, "objective.c_win must be >= 0");
  Require(tau == 0.0 || tau >= 1.0, ErrorCode::kConfig,
          "objective.tau must be 0 (derive) or >= 1");
  Require(tau_w == 0.0 || tau_w >= 1.0, ErrorCode::kConfig,
          "objective.tau_w must be 0 (derive) or >= 1");
  Require(window_size >= 0 && window_stride >= 0, ErrorCode::kConfig,
          "objective window fields must be >= 0");
  Require(!ratios.empty(), ErrorCode::kConfig, "experiment.ratios is empty");
  for (double r : ratios) {
    Require(r > 0.0 && r <= 1.0, ErrorCode::kConfig,
            "experiment.ratios must lie in (0, 1]");
  }
  Require(!samplers.empty(), ErrorCode::kConfig, "experiment.samplers is empty");
  Require(!seeds.empty(), ErrorCode::kConfig, "experiment.seeds is empty");
  Require(workers >= 1, ErrorCode::kConfig, "experiment.workers must be >= 1");
  Require(bins >= 1, ErrorCode::kConfig, "diagnostics.bins must be >= 1");
  Require(probe_lr > 0.0, ErrorCode::kConfig, "diagnostics.probe_lr must be > 0");
  Require(aux.low_max_mode >= 0 && aux.mid_max_mode >= aux.low_max_mode,
          ErrorCode::kConfig, "diagnostics band edges must be ordered");
}

ExperimentConfig ParseConfig(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    Throw(ErrorCode::kConfig, std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      Throw(ErrorCode::kConfig,
            "key '" + section + "' must appear inside a [section]");
    }
    for (const auto& [name, value] : body) {
      ApplyField(cfg, section + "." + name, value.data());
    }
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kConfig, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string DumpConfig(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : Fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

void SetConfigValue(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  ExperimentConfig next = cfg;
  ApplyField(next, key, value);
  next.Validate();
  cfg = std::move(next);
}

nlohmann::json ConfigToJson(const ExperimentConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const Field& f : Fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = f.get(cfg);
  }
  return j;
}

CoverageConfig EffectiveCoverage(const ExperimentConfig& cfg, int t_count,
                                 int budget) {
  CoverageConfig c = DeriveCoverageConfig(t_count, budget);
  if (cfg.tau > 0.0) c.tau = cfg.tau;
  if (cfg.window_size > 0) c.window_size = cfg.window_size;
  if (cfg.window_stride > 0) c.window_stride = cfg.window_stride;
  if (cfg.tau_w > 0.0) c.tau_w = cfg.tau_w;
  if (c.window_stride > c.window_size) c.window_stride = c.window_size;
  try {
    c.Validate();
  } catch (const Error& e) {
    Throw(ErrorCode::kConfig, e.what());
  }
  return c;
}

ObjectiveConfig EffectiveObjective(const ExperimentConfig& cfg, int t_count,
                                   int budget) {
  ObjectiveConfig o;
  o.lambda_cov = cfg.lambda_cov;
  o.c_win = cfg.c_win;
  o.normalize_scores = cfg.normalize_scores;
  o.coverage = EffectiveCoverage(cfg, t_count, budget);
  return o;
}

}  // namespace gits
