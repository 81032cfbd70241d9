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

// Bandwidth-delay-product sensing and compression-ratio control.
//
// Every gradient transmission interval yields one measurement (bits moved
// across the bottleneck, round completion time). The controller keeps a
// sliding window of effective-bandwidth samples and RTT samples:
//
//   EBB    = data_size / RTT
//   BtlBw  = max EBB over the window
//   RTprop = min RTT over the window
//   BDP    = BtlBw * RTprop
//
// During startup the ratio ramps additively by beta1 until the first
// congestion signal. Afterwards each interval applies
//
//   ratio = max(floor, ratio * alpha)   if data_size > bdp_fraction * BDP
//   ratio = min(1, ratio + beta2)       otherwise

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>

namespace netsense {

struct ControllerConfig {
  double alpha = 0.5;
  double beta1 = 0.05;
  double beta2 = 0.01;
  double bdp_fraction = 0.9;
  double ratio_floor = 0.005;
  double ratio_init = 0.01;
  double rtt_inflation = 1.25;  // startup exit: rtt > factor * RTprop
  std::size_t window = 10;      // intervals kept by both estimators

  void validate() const;
};

enum class Phase { kStartup, kNetSense };

const char* to_string(Phase p);

struct IntervalMeasurement {
  std::int64_t interval_index = 0;
  double data_size_bits = 0.0;
  double rtt_s = 0.0;
  bool loss = false;  // transport-reported loss during the interval
};

struct EstimatorSample {
  std::int64_t interval_index;
  double value;
};

struct ControllerState {
  ControllerConfig config;
  double ratio = 0.01;
  Phase phase = Phase::kStartup;
  std::deque<EstimatorSample> btlbw_window;  // EBB samples, bits/s
  std::deque<EstimatorSample> rtprop_window;  // RTT samples, s

  static ControllerState initial(const ControllerConfig& cfg);
  bool ready() const { return !btlbw_window.empty(); }
};

// data_size / rtt in bits per second. Throws MeasurementError.
double measure_ebb(const IntervalMeasurement& m);

// Appends the sample to both windows and evicts entries from intervals more
// than `window` intervals old.
ControllerState update_estimates(ControllerState s,
                                 const IntervalMeasurement& m);

// Throw NotReadyError on empty windows.
double btlbw(const ControllerState& s);
double rtprop(const ControllerState& s);
double compute_bdp(const ControllerState& s);

ControllerState startup_step(ControllerState s, bool congestion_seen);

ControllerState adjust_ratio(ControllerState s, double data_size_bits);

bool congestion_detected(const ControllerState& s,
                         const IntervalMeasurement& m);

// Maps a candidate ratio to the bits the next interval would put on the
// bottleneck.
using VolumePredictor = std::function<double(double ratio)>;

// One full control interval: record the measurement, then either advance
// the startup ramp or adjust against the BDP using the predicted volume of
// the upcoming round at the current ratio.
ControllerState on_interval(ControllerState s, const IntervalMeasurement& m,
                            const VolumePredictor& predict_bits);

}  // namespace netsense
