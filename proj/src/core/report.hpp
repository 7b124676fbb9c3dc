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

// Result tables for the (ratio, sampler, seed) grid and their summary.

#ifndef GITS_CORE_REPORT_HPP_
#define GITS_CORE_REPORT_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/selector.hpp"
#include "json.hpp"

namespace gits {

struct CellRecord {
  std::string dataset;
  SamplerKind sampler = SamplerKind::kGits;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  int budget = 0;
  bool ok = true;
  std::string error;
  RolloutReport report;
  double selection_time_s = 0.0;
  double train_time_s = 0.0;
  std::vector<int> selected;
};

struct AggregateStat {
  double mean = 0.0;
  double std = 0.0;  // sample std over seeds; 0 when n = 1
  int n = 0;         // successful cells
};

struct ComparisonSummary {
  std::vector<SamplerKind> samplers;  // first-appearance order
  std::vector<double> ratios;         // ascending
  std::map<SamplerKind, std::map<double, AggregateStat>> aggregates;
  bool has_gits = false;
  // Count of (ratio, seed) cells where GITS nRMSE is strictly lower than the
  // baseline's. Empty when GITS is the only sampler.
  std::map<SamplerKind, int> wins;
};

ComparisonSummary CompareReport(std::span<const CellRecord> cells);

// Ratio keys render with the shortest round-trip form ("0.1").
std::string RatioKey(double ratio);

// {aggregates: {sampler: {ratio: {mean, std, n}}}, wins}. wins is null when
// GITS is the only sampler and absent when GITS is missing.
nlohmann::json SummaryToJson(const ComparisonSummary& s);
std::string SummaryTable(const ComparisonSummary& s);

nlohmann::json CellToJson(const CellRecord& c);

// Columns: dataset, sampler, ratio, seed, nrmse, crmse, brmse, frmse_low,
// frmse_mid, frmse_high, selection_time_s, train_time_s. Failed cells carry
// "nan" metrics.
std::string ResultsCsv(std::span<const CellRecord> cells);
void WriteResultsCsv(std::span<const CellRecord> cells, const std::string& path);
std::vector<CellRecord> ParseResultsCsv(const std::string& text);

}  // namespace gits

#endif  // GITS_CORE_REPORT_HPP_
