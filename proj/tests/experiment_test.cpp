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

#include "netsense/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "netsense/error.hpp"
#include "netsense/metrics.hpp"

namespace netsense {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("netsense_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig quick_static() {
  auto cfg = resolve_config("static-bw");
  apply_override(cfg, "task.dimension=2000");
  apply_override(cfg, "train.max_steps=60");
  cfg.validate();
  return cfg;
}

TEST(Csv, RoundTripPreservesRecordsAndMeta) {
  CellMeta meta{"exp", "netsense", "20Mbps", 3, 256, 95, 0.5, 20, 10};
  std::vector<ExperimentRecord> recs(3);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    auto& r = recs[i];
    r.sim_time = 0.1 / 3.0 * static_cast<double>(i + 1);
    r.step = static_cast<std::int64_t>(i + 1);
    r.strategy = "netsense";
    r.ratio = 0.01 * static_cast<double>(i + 1);
    r.data_size = 1e5 / 7.0;
    r.rtt = 0.004;
    r.ebb = 1e7 / 3.0;
    r.btlbw = 2e7;
    r.rtprop = 0.004;
    r.bdp = 8e4;
    r.loss = 1.0 / 3.0;
    r.accuracy = 12.345678901234567;
    r.samples_per_sec = 12345.678;
    r.loss_event = i == 1;
  }
  std::stringstream ss;
  write_records_csv(ss, meta, recs);
  const auto back = read_records_csv(ss);
  EXPECT_EQ(back.meta, meta);
  EXPECT_EQ(back.records, recs);
}

TEST(Csv, SchemaAndHeaderChecked) {
  std::stringstream bad1("#schema netsense-records/0\n");
  EXPECT_THROW(read_records_csv(bad1), Error);
  std::stringstream bad2(std::string("#schema ") +
                         std::string(kRecordSchema) + "\nfoo,bar\n");
  EXPECT_THROW(read_records_csv(bad2), Error);
}

TEST(Csv, NonFiniteOrShortRowsRejected) {
  CellMeta meta{"e", "netsense", "x", 1, 1, 1, 0.5, 20, 5};
  std::stringstream ss;
  write_records_csv(ss, meta, {});
  const std::string head = ss.str();
  std::stringstream short_row(head + "1,2,3\n");
  EXPECT_THROW(read_records_csv(short_row), Error);
  std::stringstream nan_row(head + "1,1,netsense,nan,1,1,1,1,1,1,1,1,1,0\n");
  EXPECT_THROW(read_records_csv(nan_row), Error);
}

TEST(Scenario, StaticPresetWritesNineCellsAndSummary) {
  const auto dir = fresh_dir("static");
  const auto cfg = quick_static();
  const auto res = run_scenario(cfg, dir);
  EXPECT_EQ(res.cell_files.size(), 9u);
  EXPECT_EQ(res.summary.size(), 9u);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "config.ini"));
  for (const auto& cell : res.cells) {
    for (const char* series : {"accuracy", "throughput", "ratio", "bdp"}) {
      EXPECT_TRUE(fs::exists(dir / "plot" /
                             (cell_stem(cell.meta) + "." + series + ".csv")));
    }
  }
  fs::remove_all(dir);
}

TEST(Scenario, SummaryRecomputableFromCsv) {
  const auto dir = fresh_dir("summary");
  const auto res = run_scenario(quick_static(), dir);
  const auto rebuilt = summarize_directory(dir);
  ASSERT_EQ(rebuilt.size(), res.summary.size());
  for (const auto& row : res.summary) {
    const CellRun cell = read_records_file(
        dir / (row.strategy + "_" + row.bandwidth + ".csv"));
    // Documented formulas applied directly to the CSV rows.
    const auto& r = cell.records;
    EXPECT_EQ(row.steps, r.size());
    EXPECT_EQ(row.final_accuracy, r.back().accuracy);
    EXPECT_EQ(row.throughput_sps, cell.meta.samples_per_step *
                                      static_cast<double>(r.size()) /
                                      r.back().sim_time);
    EXPECT_EQ(row.tta_s, compute_tta(r, cell.meta.target_accuracy));
    const auto match = std::find_if(
        rebuilt.begin(), rebuilt.end(), [&](const SummaryRow& x) {
          return x.strategy == row.strategy && x.bandwidth == row.bandwidth;
        });
    ASSERT_NE(match, rebuilt.end());
    EXPECT_EQ(match->final_accuracy, row.final_accuracy);
    EXPECT_EQ(match->throughput_sps, row.throughput_sps);
    EXPECT_EQ(match->tta_s, row.tta_s);
    EXPECT_EQ(match->convergence_s, row.convergence_s);
    EXPECT_EQ(match->reference_time_s, row.reference_time_s);
    EXPECT_EQ(match->accuracy_at_reference, row.accuracy_at_reference);
  }
  fs::remove_all(dir);
}

TEST(Scenario, SummaryMarksUnreachedTargetNa) {
  const auto dir = fresh_dir("na");
  auto cfg = quick_static();
  apply_override(cfg, "train.target_accuracy=100.5");
  const auto res = run_scenario(cfg, dir);
  for (const auto& row : res.summary) {
    EXPECT_FALSE(row.tta_s.has_value());
    EXPECT_FALSE(row.convergence_s.has_value());
  }
  const std::string text = slurp(dir / "summary.csv");
  EXPECT_NE(text.find(",N/A,N/A,"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Scenario, AllreduceRatioSeriesIsOne) {
  const auto dir = fresh_dir("ratio");
  const auto res = run_scenario(quick_static(), dir);
  std::ifstream in(dir / "plot" / "allreduce_dense_20Mbps.ratio.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sim_time,ratio");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.substr(line.find(',') + 1), "1");
    ++rows;
  }
  EXPECT_EQ(rows, 60);
  fs::remove_all(dir);
}

TEST(Scenario, NetsenseRatioShowsSawtooth) {
  const auto dir = fresh_dir("saw");
  const auto res = run_scenario(quick_static(), dir);
  const auto& cell = res.cells[0];
  ASSERT_EQ(cell.meta.strategy, "netsense");
  int decreases = 0, increases = 0;
  for (std::size_t i = 1; i < cell.records.size(); ++i) {
    if (cell.records[i].ratio < cell.records[i - 1].ratio) ++decreases;
    if (cell.records[i].ratio > cell.records[i - 1].ratio) ++increases;
  }
  EXPECT_GT(decreases, 5);
  EXPECT_GT(increases, 5);
  fs::remove_all(dir);
}

TEST(Scenario, TraceFilesWhenEnabled) {
  const auto dir = fresh_dir("trace");
  auto cfg = quick_static();
  apply_override(cfg, "experiment.trace=true");
  apply_override(cfg, "bandwidth.levels_mbps=20");
  run_scenario(cfg, dir);
  const std::string t = slurp(dir / "netsense_20Mbps.trace.csv");
  EXPECT_EQ(t.rfind("time,type,bits,depth\n", 0), 0u);
  EXPECT_NE(t.find("enqueue"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Scenario, PrepareRejectsBadOverrideBeforeRunning) {
  EXPECT_THROW(prepare_config("static-bw", {"train.workers=0"}, std::nullopt),
               ConfigError);
  EXPECT_THROW(prepare_config("no-such-preset", {}, std::nullopt),
               ConfigError);
  const auto cfg = prepare_config("static-bw", {"train.max_steps=5"}, 9);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.train.max_steps, 5u);
}

TEST(Summarize, MissingDirectoryFails) {
  EXPECT_THROW(summarize_directory("/nonexistent/netsense"), Error);
}

}  // namespace
}  // namespace netsense
