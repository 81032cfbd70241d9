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

#include "netsense/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netsense/error.hpp"

namespace netsense {

namespace {

void push_sample(std::deque<EstimatorSample>& window, std::int64_t index,
                 double value, std::size_t w) {
  window.push_back({index, value});
  const std::int64_t oldest_kept = index - static_cast<std::int64_t>(w) + 1;
  while (!window.empty() && window.front().interval_index < oldest_kept) {
    window.pop_front();
  }
}

}  // namespace

void ControllerConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("controller." + what);
  };
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must be in (0, 1)");
  if (!(beta1 >= 0.0 && beta1 <= 1.0)) fail("beta1 must be in [0, 1]");
  if (!(beta2 >= 0.0 && beta2 <= 1.0)) fail("beta2 must be in [0, 1]");
  if (!(bdp_fraction > 0.0)) fail("bdp_fraction must be > 0");
  if (!(ratio_floor > 0.0 && ratio_floor <= 1.0)) {
    fail("ratio_floor must be in (0, 1]");
  }
  if (!(ratio_init >= ratio_floor && ratio_init <= 1.0)) {
    fail("ratio_init must be in [ratio_floor, 1]");
  }
  if (!(rtt_inflation > 1.0)) fail("rtt_inflation must be > 1");
  if (window == 0) fail("window must be >= 1");
}

const char* to_string(Phase p) {
  return p == Phase::kStartup ? "startup" : "netsense";
}

ControllerState ControllerState::initial(const ControllerConfig& cfg) {
  ControllerState s;
  s.config = cfg;
  s.ratio = cfg.ratio_init;
  return s;
}

double measure_ebb(const IntervalMeasurement& m) {
  if (!(m.rtt_s > 0.0) || !std::isfinite(m.rtt_s)) {
    throw MeasurementError("measure_ebb: rtt must be positive and finite");
  }
  if (!(m.data_size_bits >= 0.0) || !std::isfinite(m.data_size_bits)) {
    throw MeasurementError("measure_ebb: data_size must be finite and >= 0");
  }
  return m.data_size_bits / m.rtt_s;
}

ControllerState update_estimates(ControllerState s,
                                 const IntervalMeasurement& m) {
  const double ebb = measure_ebb(m);
  push_sample(s.btlbw_window, m.interval_index, ebb, s.config.window);
  push_sample(s.rtprop_window, m.interval_index, m.rtt_s, s.config.window);
  return s;
}

double btlbw(const ControllerState& s) {
  if (s.btlbw_window.empty()) {
    throw NotReadyError("btlbw: no measurements recorded");
  }
  double best = s.btlbw_window.front().value;
  for (const auto& e : s.btlbw_window) best = std::max(best, e.value);
  return best;
}

double rtprop(const ControllerState& s) {
  if (s.rtprop_window.empty()) {
    throw NotReadyError("rtprop: no measurements recorded");
  }
  double best = s.rtprop_window.front().value;
  for (const auto& e : s.rtprop_window) best = std::min(best, e.value);
  return best;
}

double compute_bdp(const ControllerState& s) { return btlbw(s) * rtprop(s); }

ControllerState startup_step(ControllerState s, bool congestion_seen) {
  if (s.phase != Phase::kStartup) {
    throw Error("startup_step: controller already left startup");
  }
  if (congestion_seen) {
    s.phase = Phase::kNetSense;
  } else {
    s.ratio = std::min(1.0, s.ratio + s.config.beta1);
  }
  return s;
}

ControllerState adjust_ratio(ControllerState s, double data_size_bits) {
  if (s.phase != Phase::kNetSense) {
    throw Error("adjust_ratio: controller is still in startup");
  }
  const ControllerConfig& c = s.config;
  if (data_size_bits > c.bdp_fraction * compute_bdp(s)) {
    s.ratio = std::max(c.ratio_floor, s.ratio * c.alpha);
  } else {
    s.ratio = std::min(1.0, s.ratio + c.beta2);
  }
  return s;
}

bool congestion_detected(const ControllerState& s,
                         const IntervalMeasurement& m) {
  if (m.loss) return true;
  return m.rtt_s > s.config.rtt_inflation * rtprop(s);
}

ControllerState on_interval(ControllerState s, const IntervalMeasurement& m,
                            const VolumePredictor& predict_bits) {
  s = update_estimates(std::move(s), m);
  if (s.phase == Phase::kStartup) {
    const bool congested = congestion_detected(s, m);
    return startup_step(std::move(s), congested);
  }
  const double next_bits = predict_bits(s.ratio);
  return adjust_ratio(std::move(s), next_bits);
}

}  // namespace netsense
