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
#include <string>
#include <string_view>
#include <vector>

#include "netsense/netsim.hpp"
#include "netsense/trainer.hpp"

namespace netsense {

// Bandwidth section as written in the config file. Rates are in Mbps.
struct BandwidthSpec {
  BandwidthSchedule::Kind kind = BandwidthSchedule::Kind::kStatic;
  std::vector<double> levels_mbps{20.0};  // static: one cell per level
  double start_mbps = 200.0;
  double end_mbps = 20.0;
  double step_mbps = 20.0;
  double dwell_s = 1.5;
  double base_mbps = 100.0;
  std::vector<double> cross_mbps{0.0, 40.0, 70.0, 20.0};
  double cross_on_s = 1.0;
  double cross_off_s = 0.5;
  double cross_phase_s = 0.0;
};

struct BandwidthCell {
  std::string label;
  BandwidthSchedule schedule;
};

struct ExperimentConfig {
  std::string name = "custom";
  std::uint64_t seed = 1;
  std::vector<StrategyKind> strategies{StrategyKind::kNetSense,
                                       StrategyKind::kTopkStatic,
                                       StrategyKind::kAllReduceDense};
  TrainConfig train;
  BandwidthSpec bandwidth;
  std::size_t throughput_window = 20;
  double convergence_band = 0.5;
  std::size_t convergence_evals = 20;
  bool trace = false;

  // Matrix rows; one per static level, otherwise a single schedule.
  std::vector<BandwidthCell> cells() const;
  // Training config for one cell with the experiment seed applied.
  TrainConfig cell_config(StrategyKind strategy,
                          const BandwidthCell& cell) const;
  void validate() const;
};

// Parses INI text. Unknown sections or keys raise ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

// Applies "section.key=value".
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
std::string preset_text(std::string_view name);

// Preset name or file path.
ExperimentConfig resolve_config(const std::string& preset_or_path);

// Canonical INI rendering; parse_config(render_config(c)) reproduces c.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace netsense
