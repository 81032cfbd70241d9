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

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "netsense/error.hpp"
#include "netsense/metrics.hpp"
#include "netsense/trainer.hpp"

namespace netsense {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kNa = "N/A";

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string(kNa);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw Error("records csv line " + std::to_string(line_no) +
                ": bad number '" + s + "'");
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& s, std::size_t line_no) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error("records csv line " + std::to_string(line_no) +
                ": bad integer '" + s + "'");
  }
  return v;
}

void open_for_write(std::ofstream& out, const fs::path& path) {
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_series(const fs::path& path, std::string_view header,
                  const std::vector<std::array<double, 3>>& rows,
                  std::size_t columns) {
  std::ofstream out;
  open_for_write(out, path);
  out << header << '\n';
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < columns; ++c) {
      if (c > 0) out << ',';
      out << format_number(r[c]);
    }
    out << '\n';
  }
  finish_write(out, path);
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string cell_stem(const CellMeta& meta) {
  return meta.strategy + "_" + meta.bandwidth;
}

void write_records_csv(std::ostream& out, const CellMeta& meta,
                       std::span<const ExperimentRecord> records) {
  out << "#schema " << kRecordSchema << '\n';
  out << "# experiment=" << meta.experiment << '\n';
  out << "# strategy=" << meta.strategy << '\n';
  out << "# bandwidth=" << meta.bandwidth << '\n';
  out << "# seed=" << meta.seed << '\n';
  out << "# samples_per_step=" << format_number(meta.samples_per_step) << '\n';
  out << "# target_accuracy=" << format_number(meta.target_accuracy) << '\n';
  out << "# convergence_band=" << format_number(meta.convergence_band)
      << '\n';
  out << "# convergence_evals=" << meta.convergence_evals << '\n';
  out << "# throughput_window=" << meta.throughput_window << '\n';
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << format_number(r.sim_time) << ',' << r.step << ',' << r.strategy
        << ',' << format_number(r.ratio) << ',' << format_number(r.data_size)
        << ',' << format_number(r.rtt) << ',' << format_number(r.ebb) << ','
        << format_number(r.btlbw) << ',' << format_number(r.rtprop) << ','
        << format_number(r.bdp) << ',' << format_number(r.loss) << ','
        << format_number(r.accuracy) << ','
        << format_number(r.samples_per_sec) << ','
        << (r.loss_event ? 1 : 0) << '\n';
  }
}

CellRun read_records_csv(std::istream& in) {
  CellRun cell;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) ||
      line != "#schema " + std::string(kRecordSchema)) {
    throw Error("records csv: missing or unsupported schema line");
  }
  ++line_no;
  std::map<std::string, std::string> meta;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line.rfind("# ", 0) == 0) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
          throw Error("records csv line " + std::to_string(line_no) +
                      ": bad metadata");
        }
        meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
        continue;
      }
      if (line != kRecordHeader) {
        throw Error("records csv: header does not match schema");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 14) {
      throw Error("records csv line " + std::to_string(line_no) +
                  ": expected 14 fields");
    }
    ExperimentRecord r;
    r.sim_time = to_double(f[0], line_no);
    r.step = to_int<std::int64_t>(f[1], line_no);
    r.strategy = f[2];
    r.ratio = to_double(f[3], line_no);
    r.data_size = to_double(f[4], line_no);
    r.rtt = to_double(f[5], line_no);
    r.ebb = to_double(f[6], line_no);
    r.btlbw = to_double(f[7], line_no);
    r.rtprop = to_double(f[8], line_no);
    r.bdp = to_double(f[9], line_no);
    r.loss = to_double(f[10], line_no);
    r.accuracy = to_double(f[11], line_no);
    r.samples_per_sec = to_double(f[12], line_no);
    const int flag = to_int<int>(f[13], line_no);
    if (flag != 0 && flag != 1) {
      throw Error("records csv line " + std::to_string(line_no) +
                  ": loss_event must be 0 or 1");
    }
    r.loss_event = flag == 1;
    if (!cell.records.empty() && !(r.sim_time > cell.records.back().sim_time)) {
      throw Error("records csv line " + std::to_string(line_no) +
                  ": sim_time not strictly increasing");
    }
    cell.records.push_back(std::move(r));
  }
  if (!header_seen) throw Error("records csv: no header row");

  const auto get = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) {
      throw Error(std::string("records csv: missing metadata '") + key + "'");
    }
    return it->second;
  };
  cell.meta.experiment = get("experiment");
  cell.meta.strategy = get("strategy");
  cell.meta.bandwidth = get("bandwidth");
  cell.meta.seed = to_int<std::uint64_t>(get("seed"), 0);
  cell.meta.samples_per_step = to_double(get("samples_per_step"), 0);
  cell.meta.target_accuracy = to_double(get("target_accuracy"), 0);
  cell.meta.convergence_band = to_double(get("convergence_band"), 0);
  cell.meta.convergence_evals =
      to_int<std::size_t>(get("convergence_evals"), 0);
  cell.meta.throughput_window =
      to_int<std::size_t>(get("throughput_window"), 0);
  return cell;
}

CellRun read_records_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  try {
    return read_records_csv(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

SummaryRow summarize_cell(const CellRun& cell) {
  const auto& m = cell.meta;
  const std::span<const ExperimentRecord> recs(cell.records);
  SummaryRow row;
  row.strategy = m.strategy;
  row.bandwidth = m.bandwidth;
  row.steps = recs.size();
  if (!recs.empty()) row.final_accuracy = recs.back().accuracy;
  row.best_accuracy = best_accuracy(recs).accuracy;
  row.throughput_sps = mean_throughput(recs, m.samples_per_step);
  row.tta_s = compute_tta(recs, m.target_accuracy);
  row.convergence_s = convergence_time(recs, m.target_accuracy,
                                       m.convergence_band, m.convergence_evals);
  return row;
}

std::vector<SummaryRow> summarize_cells(const std::vector<CellRun>& cells) {
  std::vector<SummaryRow> rows;
  std::map<std::string, double> reference;
  for (const auto& c : cells) {
    if (c.meta.strategy == to_string(StrategyKind::kNetSense) &&
        !c.records.empty()) {
      reference[c.meta.bandwidth] = best_accuracy(c.records).sim_time;
    }
  }
  for (const auto& c : cells) {
    SummaryRow row = summarize_cell(c);
    const auto it = reference.find(c.meta.bandwidth);
    if (it != reference.end()) {
      row.reference_time_s = it->second;
      row.accuracy_at_reference = accuracy_at(c.records, it->second);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "#schema " << kSummarySchema << '\n';
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.strategy << ',' << r.bandwidth << ',' << r.steps << ','
        << format_number(r.final_accuracy) << ','
        << format_number(r.best_accuracy) << ','
        << format_number(r.throughput_sps) << ',' << format_optional(r.tta_s)
        << ',' << format_optional(r.convergence_s) << ','
        << format_optional(r.reference_time_s) << ','
        << format_optional(r.accuracy_at_reference) << '\n';
  }
}

std::vector<fs::path> emit_plotdata(const CellRun& cell, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  const std::string stem = cell_stem(cell.meta);
  std::vector<std::array<double, 3>> acc, thr, ratio, bdp;
  for (const auto& r : cell.records) {
    acc.push_back({r.sim_time, r.accuracy, 0.0});
    ratio.push_back({r.sim_time, r.ratio, 0.0});
    bdp.push_back({r.sim_time, r.bdp, r.data_size});
  }
  for (const auto& p :
       compute_throughput(cell.records, cell.meta.throughput_window)) {
    thr.push_back({p.sim_time, p.samples_per_sec, 0.0});
  }
  std::vector<fs::path> files{dir / (stem + ".accuracy.csv"),
                              dir / (stem + ".throughput.csv"),
                              dir / (stem + ".ratio.csv"),
                              dir / (stem + ".bdp.csv")};
  write_series(files[0], "sim_time,accuracy", acc, 2);
  write_series(files[1], "sim_time,samples_per_sec", thr, 2);
  write_series(files[2], "sim_time,ratio", ratio, 2);
  write_series(files[3], "sim_time,bdp,data_size", bdp, 3);
  return files;
}

ExperimentConfig prepare_config(const std::string& preset_or_path,
                                const std::vector<std::string>& overrides,
                                std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = resolve_config(preset_or_path);
  for (const auto& o : overrides) apply_override(cfg, o);
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg,
                            const fs::path& out_dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error("cannot create '" + out_dir.string() + "': " + ec.message());
  }
  {
    const fs::path path = out_dir / "config.ini";
    std::ofstream out;
    open_for_write(out, path);
    out << render_config(cfg);
    finish_write(out, path);
  }

  ScenarioResult result;
  for (const auto& cell : cfg.cells()) {
    for (const StrategyKind strategy : cfg.strategies) {
      const TrainConfig tc = cfg.cell_config(strategy, cell);
      CellRun run;
      run.meta.experiment = cfg.name;
      run.meta.strategy = to_string(strategy);
      run.meta.bandwidth = cell.label;
      run.meta.seed = cfg.seed;
      run.meta.samples_per_step =
          static_cast<double>(tc.batch) * static_cast<double>(tc.workers);
      run.meta.target_accuracy = tc.target_accuracy;
      run.meta.convergence_band = cfg.convergence_band;
      run.meta.convergence_evals = cfg.convergence_evals;
      run.meta.throughput_window = cfg.throughput_window;
      const std::string stem = cell_stem(run.meta);

      Trainer trainer(tc);
      std::ofstream trace;
      if (cfg.trace) {
        const fs::path tpath = out_dir / (stem + ".trace.csv");
        open_for_write(trace, tpath);
        trace << "time,type,bits,depth\n";
        trace.precision(17);
        trainer.set_trace(&trace);
      }
      run.records = run_training(trainer).records;
      if (cfg.trace) finish_write(trace, out_dir / (stem + ".trace.csv"));

      const fs::path path = out_dir / (stem + ".csv");
      std::ofstream out;
      open_for_write(out, path);
      write_records_csv(out, run.meta, run.records);
      finish_write(out, path);
      emit_plotdata(run, out_dir / "plot");
      result.cell_files.push_back(path);
      result.cells.push_back(std::move(run));
    }
  }

  result.summary = summarize_cells(result.cells);
  result.summary_file = out_dir / "summary.csv";
  std::ofstream out;
  open_for_write(out, result.summary_file);
  write_summary_csv(out, result.summary);
  finish_write(out, result.summary_file);
  return result;
}

std::vector<SummaryRow> summarize_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error("'" + dir.string() + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") {
      continue;
    }
    std::ifstream in(entry.path(), std::ios::binary);
    std::string first;
    std::getline(in, first);
    if (first == "#schema " + std::string(kRecordSchema)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<CellRun> cells;
  for (const auto& f : files) cells.push_back(read_records_file(f));
  return summarize_cells(cells);
}

}  // namespace netsense
