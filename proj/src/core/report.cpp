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

#include "core/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/common.hpp"

namespace gits {

namespace {

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseNum(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    Throw(ErrorCode::kFormat, "bad number '" + s + "' in results CSV");
  }
  return v;
}

constexpr const char* kCsvHeader =
    "dataset,sampler,ratio,seed,nrmse,crmse,brmse,frmse_low,frmse_mid,"
    "frmse_high,selection_time_s,train_time_s";

}  // namespace

std::string RatioKey(double ratio) { return Num(ratio); }

ComparisonSummary CompareReport(std::span<const CellRecord> cells) {
  ComparisonSummary s;
  std::map<SamplerKind, std::map<double, std::vector<double>>> values;
  // nRMSE per (sampler, ratio, seed) for the win count.
  std::map<std::tuple<SamplerKind, double, std::uint64_t>, double> by_cell;
  for (const CellRecord& c : cells) {
    if (std::find(s.samplers.begin(), s.samplers.end(), c.sampler) ==
        s.samplers.end()) {
      s.samplers.push_back(c.sampler);
    }
    if (std::find(s.ratios.begin(), s.ratios.end(), c.ratio) == s.ratios.end()) {
      s.ratios.push_back(c.ratio);
    }
    auto& bucket = values[c.sampler][c.ratio];
    if (c.ok && std::isfinite(c.report.nrmse)) {
      bucket.push_back(c.report.nrmse);
      by_cell[{c.sampler, c.ratio, c.seed}] = c.report.nrmse;
    }
  }
  std::sort(s.ratios.begin(), s.ratios.end());

  for (const auto& [sampler, per_ratio] : values) {
    for (const auto& [ratio, v] : per_ratio) {
      AggregateStat a;
      a.n = static_cast<int>(v.size());
      if (a.n > 0) {
        double sum = 0.0;
        for (double x : v) sum += x;
        a.mean = sum / a.n;
        if (a.n > 1) {
          double sq = 0.0;
          for (double x : v) sq += (x - a.mean) * (x - a.mean);
          a.std = std::sqrt(sq / (a.n - 1));
        }
      } else {
        a.mean = std::nan("");
        a.std = std::nan("");
      }
      s.aggregates[sampler][ratio] = a;
    }
  }

  s.has_gits = values.count(SamplerKind::kGits) > 0;
  if (!s.has_gits) return s;
  for (SamplerKind b : s.samplers) {
    if (b == SamplerKind::kGits) continue;
    int wins = 0;
    for (const auto& [key, nrmse] : by_cell) {
      if (std::get<0>(key) != SamplerKind::kGits) continue;
      const auto other = by_cell.find({b, std::get<1>(key), std::get<2>(key)});
      if (other != by_cell.end() && nrmse < other->second) ++wins;
    }
    s.wins[b] = wins;
  }
  return s;
}

nlohmann::json SummaryToJson(const ComparisonSummary& s) {
  nlohmann::json agg = nlohmann::json::object();
  for (SamplerKind k : s.samplers) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [ratio, a] : s.aggregates.at(k)) {
      nlohmann::json e;
      e["mean"] = std::isfinite(a.mean) ? nlohmann::json(a.mean) : nullptr;
      e["std"] = std::isfinite(a.std) ? nlohmann::json(a.std) : nullptr;
      e["n"] = a.n;
      per[RatioKey(ratio)] = e;
    }
    agg[std::string(ToString(k))] = per;
  }
  nlohmann::json j;
  j["aggregates"] = agg;
  if (s.has_gits) {
    if (s.wins.empty()) {
      j["wins"] = nullptr;
    } else {
      nlohmann::json w = nlohmann::json::object();
      for (const auto& [b, n] : s.wins) w[std::string(ToString(b))] = n;
      j["wins"] = w;
    }
  }
  return j;
}

std::string SummaryTable(const ComparisonSummary& s) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-14s", "sampler");
  out << buf;
  for (double r : s.ratios) {
    std::snprintf(buf, sizeof(buf), "  %-22s", ("ratio " + RatioKey(r)).c_str());
    out << buf;
  }
  out << "\n";
  for (SamplerKind k : s.samplers) {
    std::snprintf(buf, sizeof(buf), "%-14s", std::string(ToString(k)).c_str());
    out << buf;
    const auto& per = s.aggregates.at(k);
    for (double r : s.ratios) {
      const auto it = per.find(r);
      if (it == per.end() || it->second.n == 0) {
        std::snprintf(buf, sizeof(buf), "  %-22s", "-");
      } else {
        std::snprintf(buf, sizeof(buf), "  %.4f +/- %.4f (n=%d)",
                      it->second.mean, it->second.std, it->second.n);
      }
      out << buf;
    }
    out << "\n";
  }
  if (s.has_gits) {
    out << "\nGITS wins (strictly lower nRMSE per ratio/seed cell):\n";
    if (s.wins.empty()) out << "  none (no baselines)\n";
    for (const auto& [b, n] : s.wins) {
      out << "  vs " << ToString(b) << ": " << n << "\n";
    }
  }
  return out.str();
}

nlohmann::json CellToJson(const CellRecord& c) {
  nlohmann::json j;
  j["dataset"] = c.dataset;
  j["sampler"] = std::string(ToString(c.sampler));
  j["ratio"] = c.ratio;
  j["seed"] = c.seed;
  j["K"] = c.budget;
  j["status"] = c.ok ? "ok" : "failed";
  if (!c.ok) j["error"] = c.error;
  if (c.ok) {
    j["nrmse"] = c.report.nrmse;
    j["crmse"] = c.report.crmse;
    j["brmse"] = c.report.brmse;
    j["frmse_low"] = c.report.frmse_low;
    j["frmse_mid"] = c.report.frmse_mid;
    j["frmse_high"] = c.report.frmse_high;
  }
  j["selection_time_s"] = c.selection_time_s;
  j["train_time_s"] = c.train_time_s;
  j["selected"] = c.selected;
  return j;
}

std::string ResultsCsv(std::span<const CellRecord> cells) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  const double nan = std::nan("");
  for (const CellRecord& c : cells) {
    const RolloutReport& r = c.report;
    out << c.dataset << ',' << ToString(c.sampler) << ',' << Num(c.ratio) << ','
        << c.seed << ',' << Num(c.ok ? r.nrmse : nan) << ','
        << Num(c.ok ? r.crmse : nan) << ',' << Num(c.ok ? r.brmse : nan) << ','
        << Num(c.ok ? r.frmse_low : nan) << ','
        << Num(c.ok ? r.frmse_mid : nan) << ','
        << Num(c.ok ? r.frmse_high : nan) << ',' << Num(c.selection_time_s)
        << ',' << Num(c.train_time_s) << "\n";
  }
  return out.str();
}

void WriteResultsCsv(std::span<const CellRecord> cells, const std::string& path) {
  std::ofstream out(path);
  Require(static_cast<bool>(out), ErrorCode::kIo,
          "cannot open " + path + " for writing");
  out << ResultsCsv(cells);
}

std::vector<CellRecord> ParseResultsCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)) && line == kCsvHeader,
          ErrorCode::kFormat, "results CSV header mismatch");
  std::vector<CellRecord> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    Require(f.size() == 12, ErrorCode::kFormat, "results CSV row has " +
                                                    std::to_string(f.size()) +
                                                    " fields, expected 12");
    CellRecord c;
    c.dataset = f[0];
    c.sampler = ParseSampler(f[1]);
    c.ratio = ParseNum(f[2]);
    c.seed = static_cast<std::uint64_t>(ParseNum(f[3]));
    c.report.nrmse = ParseNum(f[4]);
    c.report.crmse = ParseNum(f[5]);
    c.report.brmse = ParseNum(f[6]);
    c.report.frmse_low = ParseNum(f[7]);
    c.report.frmse_mid = ParseNum(f[8]);
    c.report.frmse_high = ParseNum(f[9]);
    c.selection_time_s = ParseNum(f[10]);
    c.train_time_s = ParseNum(f[11]);
    c.ok = std::isfinite(c.report.nrmse);
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace gits
