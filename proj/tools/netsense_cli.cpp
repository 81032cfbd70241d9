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

// netsense: run scenario presets, rebuild summaries, check config files.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netsense/config.hpp"
#include "netsense/error.hpp"
#include "netsense/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

int cmd_run(const std::string& target, std::optional<std::uint64_t> seed,
            const std::string& out_dir,
            const std::vector<std::string>& overrides) {
  netsense::ExperimentConfig cfg;
  try {
    cfg = netsense::prepare_config(target, overrides, seed);
  } catch (const netsense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto result = netsense::run_scenario(cfg, out_dir);
    for (const auto& f : result.cell_files) std::cout << f.string() << '\n';
    std::cout << result.summary_file.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRun;
  }
  return kExitOk;
}

int cmd_summarize(const std::string& dir) {
  try {
    netsense::write_summary_csv(std::cout, netsense::summarize_directory(dir));
  } catch (const std::exception& e) {
    std::cerr << "summarize failed: " << e.what() << '\n';
    return kExitRun;
  }
  return kExitOk;
}

int cmd_validate(const std::string& target,
                 const std::vector<std::string>& overrides, bool print) {
  try {
    const auto cfg = netsense::prepare_config(target, overrides, std::nullopt);
    if (print) {
      std::cout << netsense::render_config(cfg);
    } else {
      std::cout << "ok: " << cfg.name << ", " << cfg.cells().size()
                << " bandwidth cell(s) x " << cfg.strategies.size()
                << " strateg" << (cfg.strategies.size() == 1 ? "y" : "ies")
                << '\n';
    }
  } catch (const netsense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network-adaptive gradient compression simulator"};
  app.require_subcommand(1);

  std::string run_target;
  std::string out_dir = "out";
  std::uint64_t seed_value = 0;
  std::vector<std::string> run_overrides;
  auto* run = app.add_subcommand("run", "Run a preset or config file");
  run->add_option("target", run_target, "Preset name or config path")
      ->required();
  auto* seed_opt =
      run->add_option("--seed", seed_value, "Override experiment.seed");
  run->add_option("--out-dir", out_dir, "Output directory")
      ->capture_default_str();
  run->add_option("--override", run_overrides, "section.key=value")
      ->take_all();

  std::string summary_dir;
  auto* summarize =
      app.add_subcommand("summarize", "Rebuild the summary from cell CSVs");
  summarize->add_option("dir", summary_dir, "Directory of cell CSVs")
      ->required();

  std::string validate_target;
  std::vector<std::string> validate_overrides;
  bool print_config = false;
  auto* validate =
      app.add_subcommand("validate-config", "Parse and check a config");
  validate->add_option("target", validate_target, "Preset name or config path")
      ->required();
  validate->add_option("--override", validate_overrides, "section.key=value")
      ->take_all();
  validate->add_flag("--print", print_config, "Print the resolved config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) {
    std::optional<std::uint64_t> seed;
    if (*seed_opt) seed = seed_value;
    return cmd_run(run_target, seed, out_dir, run_overrides);
  }
  if (*summarize) return cmd_summarize(summary_dir);
  return cmd_validate(validate_target, validate_overrides, print_config);
}
