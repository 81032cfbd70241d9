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

#include "netsense/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "netsense/error.hpp"

namespace netsense {

namespace {

constexpr double kMbps = 1e6;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + raw + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + raw +
                      "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split_list(raw)) {
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items,
                 const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += f(items[i]);
  }
  return out;
}

BandwidthSchedule::Kind parse_schedule_kind(const std::string& key,
                                            const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "static") return BandwidthSchedule::Kind::kStatic;
  if (s == "degrading") return BandwidthSchedule::Kind::kDegrading;
  if (s == "fluctuating") return BandwidthSchedule::Kind::kFluctuating;
  throw ConfigError(key + ": unknown schedule '" + raw + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct KeySpec {
  std::string section;
  std::string name;
  Setter set;
  Getter get;
};

template <typename Field>
KeySpec real_key(std::string section, std::string name, Field field) {
  return {std::move(section), std::move(name),
          [field](ExperimentConfig& c, const std::string& k,
                  const std::string& v) { field(c) = parse_double(k, v); },
          [field](const ExperimentConfig& c) {
            return format_double(field(c));
          }};
}

template <typename Field>
KeySpec uint_key(std::string section, std::string name, Field field) {
  return {std::move(section), std::move(name),
          [field](ExperimentConfig& c, const std::string& k,
                  const std::string& v) {
            using T = std::remove_reference_t<decltype(field(c))>;
            field(c) = static_cast<T>(parse_uint(k, v));
          },
          [field](const ExperimentConfig& c) {
            return std::to_string(field(c));
          }};
}

template <typename Field>
KeySpec bool_key(std::string section, std::string name, Field field) {
  return {std::move(section), std::move(name),
          [field](ExperimentConfig& c, const std::string& k,
                  const std::string& v) { field(c) = parse_bool(k, v); },
          [field](const ExperimentConfig& c) {
            return std::string(
                field(c) ? "true" : "false");
          }};
}

#define NS_FIELD(expr) [](auto& c) -> auto& { return expr; }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    // [experiment]
    t.push_back({"experiment", "name",
                 [](ExperimentConfig& c, const std::string&,
                    const std::string& v) { c.name = trim(v); },
                 [](const ExperimentConfig& c) { return c.name; }});
    t.push_back(uint_key("experiment", "seed", NS_FIELD(c.seed)));
    t.push_back(
        {"experiment", "strategies",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
           std::vector<StrategyKind> kinds;
           for (const auto& s : split_list(v)) {
             try {
               kinds.push_back(parse_strategy_kind(s));
             } catch (const ConfigError&) {
               throw ConfigError(k + ": unknown strategy '" + s + "'");
             }
           }
           if (kinds.empty()) throw ConfigError(k + ": empty list");
           c.strategies = std::move(kinds);
         },
         [](const ExperimentConfig& c) {
           return join<StrategyKind>(c.strategies, [](const StrategyKind& s) {
             return std::string(to_string(s));
           });
         }});
    t.push_back(bool_key("experiment", "trace", NS_FIELD(c.trace)));

    // [task]
    t.push_back({"task", "kind",
                 [](ExperimentConfig& c, const std::string&,
                    const std::string& v) {
                   c.train.task.kind = parse_task_kind(trim(v));
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(to_string(c.train.task.kind));
                 }});
    t.push_back(
        uint_key("task", "dimension", NS_FIELD(c.train.task.dimension)));
    t.push_back(real_key("task", "signal_fraction",
                         NS_FIELD(c.train.task.signal_fraction)));
    t.push_back(real_key("task", "signal_target",
                         NS_FIELD(c.train.task.signal_target)));
    t.push_back(real_key("task", "signal_start",
                         NS_FIELD(c.train.task.signal_start)));
    t.push_back(
        real_key("task", "tail_scale", NS_FIELD(c.train.task.tail_scale)));
    t.push_back(
        real_key("task", "tail_error", NS_FIELD(c.train.task.tail_error)));
    t.push_back(real_key("task", "curvature_min",
                         NS_FIELD(c.train.task.curvature_min)));
    t.push_back(real_key("task", "worker_spread",
                         NS_FIELD(c.train.task.worker_spread)));
    t.push_back(
        real_key("task", "batch_noise", NS_FIELD(c.train.task.batch_noise)));
    t.push_back(uint_key("task", "features", NS_FIELD(c.train.task.features)));
    t.push_back(uint_key("task", "classes", NS_FIELD(c.train.task.classes)));
    t.push_back(uint_key("task", "hidden", NS_FIELD(c.train.task.hidden)));
    t.push_back(
        real_key("task", "separation", NS_FIELD(c.train.task.separation)));
    t.push_back(
        uint_key("task", "eval_samples", NS_FIELD(c.train.task.eval_samples)));
    t.push_back(
        real_key("task", "init_scale", NS_FIELD(c.train.task.init_scale)));

    // [train]
    t.push_back(
        {"train", "workers",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
           const auto n = parse_uint(k, v);
           if (n < 2 || n > 4096) throw ConfigError(k + ": out of range");
           c.train.workers = static_cast<int>(n);
         },
         [](const ExperimentConfig& c) {
           return std::to_string(c.train.workers);
         }});
    t.push_back(uint_key("train", "batch", NS_FIELD(c.train.batch)));
    t.push_back(real_key("train", "learning_rate",
                         NS_FIELD(c.train.learning_rate)));
    t.push_back(real_key("train", "compute_time_s",
                         NS_FIELD(c.train.compute_time_s)));
    t.push_back(real_key("train", "codec_overhead_s",
                         NS_FIELD(c.train.codec_overhead_s)));
    t.push_back(uint_key("train", "max_steps", NS_FIELD(c.train.max_steps)));
    t.push_back(real_key("train", "max_sim_time_s",
                         NS_FIELD(c.train.max_sim_time_s)));
    t.push_back(real_key("train", "target_accuracy",
                         NS_FIELD(c.train.target_accuracy)));
    t.push_back(
        real_key("train", "target_loss", NS_FIELD(c.train.target_loss)));
    t.push_back(
        bool_key("train", "stop_at_target", NS_FIELD(c.train.stop_at_target)));

    // [strategy]
    t.push_back(real_key("strategy", "topk_rate",
                         NS_FIELD(c.train.strategy.topk_rate)));
    t.push_back(bool_key("strategy", "error_feedback",
                         NS_FIELD(c.train.strategy.error_feedback)));
    t.push_back(real_key("strategy", "pinned_ratio",
                         NS_FIELD(c.train.strategy.pinned_ratio)));

    // [compression]
    t.push_back(real_key("compression", "tr_q",
                         NS_FIELD(c.train.strategy.compression.tr_q)));
    t.push_back(real_key("compression", "tr_d",
                         NS_FIELD(c.train.strategy.compression.tr_d)));
    t.push_back(bool_key("compression", "pruning",
                         NS_FIELD(c.train.strategy.compression.pruning)));
    t.push_back(
        uint_key("compression", "index_width_bytes",
                 NS_FIELD(c.train.strategy.compression.index_width_bytes)));
    t.push_back(uint_key("compression", "header_bytes",
                         NS_FIELD(c.train.strategy.compression.header_bytes)));

    // [controller]
    t.push_back(real_key("controller", "alpha",
                         NS_FIELD(c.train.strategy.controller.alpha)));
    t.push_back(real_key("controller", "beta1",
                         NS_FIELD(c.train.strategy.controller.beta1)));
    t.push_back(real_key("controller", "beta2",
                         NS_FIELD(c.train.strategy.controller.beta2)));
    t.push_back(real_key("controller", "bdp_fraction",
                         NS_FIELD(c.train.strategy.controller.bdp_fraction)));
    t.push_back(real_key("controller", "ratio_floor",
                         NS_FIELD(c.train.strategy.controller.ratio_floor)));
    t.push_back(real_key("controller", "ratio_init",
                         NS_FIELD(c.train.strategy.controller.ratio_init)));
    t.push_back(real_key("controller", "rtt_inflation",
                         NS_FIELD(c.train.strategy.controller.rtt_inflation)));
    t.push_back(uint_key("controller", "window",
                         NS_FIELD(c.train.strategy.controller.window)));

    // [link]
    t.push_back(
        real_key("link", "prop_delay_s", NS_FIELD(c.train.link.prop_delay_s)));
    t.push_back(real_key("link", "queue_cap_bits",
                         NS_FIELD(c.train.link.queue_cap_bits)));
    t.push_back(real_key("link", "loss_recovery_rtts",
                         NS_FIELD(c.train.link.loss_recovery_rtts)));

    // [bandwidth]
    t.push_back({"bandwidth", "schedule",
                 [](ExperimentConfig& c, const std::string& k,
                    const std::string& v) {
                   c.bandwidth.kind = parse_schedule_kind(k, v);
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(to_string(c.bandwidth.kind));
                 }});
    const auto list_key = [](std::string name,
                             std::vector<double> BandwidthSpec::*member) {
      return KeySpec{
          "bandwidth", name,
          [member](ExperimentConfig& c, const std::string& k,
                   const std::string& v) {
            c.bandwidth.*member = parse_double_list(k, v);
          },
          [member](const ExperimentConfig& c) {
            return join<double>(c.bandwidth.*member, format_double);
          }};
    };
    t.push_back(list_key("levels_mbps", &BandwidthSpec::levels_mbps));
    t.push_back(
        real_key("bandwidth", "start_mbps", NS_FIELD(c.bandwidth.start_mbps)));
    t.push_back(
        real_key("bandwidth", "end_mbps", NS_FIELD(c.bandwidth.end_mbps)));
    t.push_back(
        real_key("bandwidth", "step_mbps", NS_FIELD(c.bandwidth.step_mbps)));
    t.push_back(
        real_key("bandwidth", "dwell_s", NS_FIELD(c.bandwidth.dwell_s)));
    t.push_back(
        real_key("bandwidth", "base_mbps", NS_FIELD(c.bandwidth.base_mbps)));
    t.push_back(list_key("cross_mbps", &BandwidthSpec::cross_mbps));
    t.push_back(
        real_key("bandwidth", "cross_on_s", NS_FIELD(c.bandwidth.cross_on_s)));
    t.push_back(real_key("bandwidth", "cross_off_s",
                         NS_FIELD(c.bandwidth.cross_off_s)));
    t.push_back(real_key("bandwidth", "cross_phase_s",
                         NS_FIELD(c.bandwidth.cross_phase_s)));

    // [metrics]
    t.push_back(
        uint_key("metrics", "throughput_window",
                 NS_FIELD(c.throughput_window)));
    t.push_back(
        real_key("metrics", "convergence_band", NS_FIELD(c.convergence_band)));
    t.push_back(
        uint_key("metrics", "convergence_evals",
                 NS_FIELD(c.convergence_evals)));
    return t;
  }();
  return table;
}

#undef NS_FIELD

const KeySpec& find_key(const std::string& section, const std::string& name) {
  for (const auto& k : key_table()) {
    if (k.section == section && k.name == name) return k;
  }
  throw ConfigError("unknown config key '" + section + "." + name + "'");
}

void apply_ptree(ExperimentConfig& cfg,
                 const boost::property_tree::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config key '" + section +
                        "' must live inside a [section]");
    }
    for (const auto& [name, leaf] : body) {
      const KeySpec& k = find_key(section, name);
      k.set(cfg, section + "." + name, leaf.data());
    }
  }
}

constexpr std::string_view kStaticPreset = R"(# Three static bottleneck levels.
[experiment]
name = static-bw
seed = 1
strategies = netsense, topk_static, allreduce_dense

[task]
kind = quadratic
dimension = 10000

[train]
workers = 8
batch = 32
learning_rate = 0.05
max_steps = 400
target_accuracy = 95

[bandwidth]
schedule = static
levels_mbps = 20, 50, 80

[link]
prop_delay_s = 0.002
)";

constexpr std::string_view kDegradingPreset =
    R"(# Ten-level staircase, one step down per dwell period.
[experiment]
name = degrading-bw
seed = 1
strategies = netsense, topk_static, allreduce_dense

[task]
kind = quadratic
dimension = 10000

[train]
workers = 8
batch = 32
learning_rate = 0.05
max_steps = 100000
max_sim_time_s = 15
target_accuracy = 95

[bandwidth]
schedule = degrading
start_mbps = 200
end_mbps = 20
step_mbps = 20
dwell_s = 1.5

[link]
prop_delay_s = 0.002
)";

constexpr std::string_view kFluctuatingPreset =
    R"(# Fixed capacity shared with on/off competing traffic.
[experiment]
name = fluctuating-bw
seed = 1
strategies = netsense, topk_static, allreduce_dense

[task]
kind = quadratic
dimension = 10000

[train]
workers = 8
batch = 32
learning_rate = 0.05
max_steps = 100000
max_sim_time_s = 12
target_accuracy = 95

[bandwidth]
schedule = fluctuating
base_mbps = 100
cross_mbps = 0, 40, 70, 20, 85, 55
cross_on_s = 1.5
cross_off_s = 0.5

[link]
prop_delay_s = 0.002
)";

}  // namespace

std::vector<BandwidthCell> ExperimentConfig::cells() const {
  std::vector<BandwidthCell> out;
  const auto& b = bandwidth;
  switch (b.kind) {
    case BandwidthSchedule::Kind::kStatic:
      for (const double mbps : b.levels_mbps) {
        out.push_back({format_double(mbps) + "Mbps",
                       BandwidthSchedule::fixed(mbps * kMbps)});
      }
      break;
    case BandwidthSchedule::Kind::kDegrading:
      out.push_back({format_double(b.start_mbps) + "-" +
                         format_double(b.end_mbps) + "Mbps",
                     BandwidthSchedule::degrading(
                         b.start_mbps * kMbps, b.end_mbps * kMbps,
                         b.step_mbps * kMbps, b.dwell_s)});
      break;
    case BandwidthSchedule::Kind::kFluctuating: {
      std::vector<double> rates;
      for (const double r : b.cross_mbps) rates.push_back(r * kMbps);
      out.push_back({format_double(b.base_mbps) + "Mbps-fluct",
                     BandwidthSchedule::fluctuating(
                         b.base_mbps * kMbps, std::move(rates), b.cross_on_s,
                         b.cross_off_s, b.cross_phase_s)});
      break;
    }
  }
  return out;
}

TrainConfig ExperimentConfig::cell_config(StrategyKind strategy,
                                          const BandwidthCell& cell) const {
  TrainConfig t = train;
  t.strategy.kind = strategy;
  t.bandwidth = cell.schedule;
  t.seed = seed;
  t.task.seed = seed;
  return t;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("experiment.name must not be empty");
  if (strategies.empty()) {
    throw ConfigError("experiment.strategies must not be empty");
  }
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    for (std::size_t j = i + 1; j < strategies.size(); ++j) {
      if (strategies[i] == strategies[j]) {
        throw ConfigError("experiment.strategies lists a strategy twice");
      }
    }
  }
  if (throughput_window < 1) {
    throw ConfigError("metrics.throughput_window must be >= 1");
  }
  if (!(convergence_band >= 0.0)) {
    throw ConfigError("metrics.convergence_band must be >= 0");
  }
  if (convergence_evals < 1) {
    throw ConfigError("metrics.convergence_evals must be >= 1");
  }
  if (bandwidth.kind == BandwidthSchedule::Kind::kStatic) {
    std::vector<double> sorted = bandwidth.levels_mbps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("bandwidth.levels_mbps has duplicate levels");
    }
  }
  for (const auto& cell : cells()) {
    cell_config(strategies.front(), cell).validate();
  }
}

ExperimentConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig cfg;
  apply_ptree(cfg, tree);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) +
                      "' is not of the form section.key=value");
  }
  const std::string lhs = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = lhs.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size()) {
    throw ConfigError("override key '" + lhs + "' must be section.key");
  }
  const KeySpec& k = find_key(lhs.substr(0, dot), lhs.substr(dot + 1));
  k.set(cfg, lhs, value);
}

std::vector<std::string> preset_names() {
  return {"static-bw", "degrading-bw", "fluctuating-bw"};
}

bool is_preset(std::string_view name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string preset_text(std::string_view name) {
  if (name == "static-bw") return std::string(kStaticPreset);
  if (name == "degrading-bw") return std::string(kDegradingPreset);
  if (name == "fluctuating-bw") return std::string(kFluctuatingPreset);
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ExperimentConfig resolve_config(const std::string& preset_or_path) {
  if (is_preset(preset_or_path)) {
    return parse_config(preset_text(preset_or_path));
  }
  return load_config_file(preset_or_path);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace netsense
