// Copyright 2026 The netsense Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netsense/config.hpp"
#include "netsense/record.hpp"

namespace netsense {

inline constexpr std::string_view kRecordSchema = "netsense-records/1";
inline constexpr std::string_view kSummarySchema = "netsense-summary/1";
inline constexpr std::string_view kRecordHeader =
    "sim_time,step,strategy,ratio,data_size,rtt,ebb,btlbw,rtprop,bdp,loss,"
    "accuracy,samples_per_sec,loss_event";
inline constexpr std::string_view kSummaryHeader =
    "strategy,bandwidth,steps,final_accuracy,best_accuracy,throughput_sps,"
    "tta_s,convergence_s,reference_time_s,accuracy_at_reference";

// Shortest round-trip decimal form.
std::string format_number(double v);

// Everything the summary needs besides the rows, stored as "# key=value"
// lines at the top of each cell CSV.
struct CellMeta {
  std::string experiment;
  std::string strategy;
  std::string bandwidth;
  std::uint64_t seed = 0;
  double samples_per_step = 0.0;
  double target_accuracy = 0.0;
  double convergence_band = 0.5;
  std::size_t convergence_evals = 20;
  std::size_t throughput_window = 20;

  bool operator==(const CellMeta&) const = default;
};

struct CellRun {
  CellMeta meta;
  std::vector<ExperimentRecord> records;
};

void write_records_csv(std::ostream& out, const CellMeta& meta,
                       std::span<const ExperimentRecord> records);
CellRun read_records_csv(std::istream& in);
CellRun read_records_file(const std::filesystem::path& path);

struct SummaryRow {
  std::string strategy;
  std::string bandwidth;
  std::size_t steps = 0;
  double final_accuracy = 0.0;
  double best_accuracy = 0.0;
  double throughput_sps = 0.0;
  std::optional<double> tta_s;
  std::optional<double> convergence_s;
  // Time netsense first hits its best accuracy on the same bandwidth, and
  // this cell's accuracy at that moment.
  std::optional<double> reference_time_s;
  std::optional<double> accuracy_at_reference;
};

SummaryRow summarize_cell(const CellRun& cell);
std::vector<SummaryRow> summarize_cells(const std::vector<CellRun>& cells);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Writes the four series files for one cell into `dir`; returns their paths.
std::vector<std::filesystem::path> emit_plotdata(
    const CellRun& cell, const std::filesystem::path& dir);

std::string cell_stem(const CellMeta& meta);

struct ScenarioResult {
  std::vector<CellRun> cells;
  std::vector<SummaryRow> summary;
  std::vector<std::filesystem::path> cell_files;
  std::filesystem::path summary_file;
};

// Runs every (bandwidth x strategy) cell and writes CSVs, plot data, the
// resolved config and summary.csv under out_dir.
ScenarioResult run_scenario(const ExperimentConfig& cfg,
                            const std::filesystem::path& out_dir);

// Resolves a preset or path, applies overrides, then validates before any
// cell runs.
ExperimentConfig prepare_config(const std::string& preset_or_path,
                                const std::vector<std::string>& overrides,
                                std::optional<std::uint64_t> seed);

// Rebuilds the summary from the cell CSVs in `dir`.
std::vector<SummaryRow> summarize_directory(const std::filesystem::path& dir);

}  // namespace netsense
