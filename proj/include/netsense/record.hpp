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

namespace netsense {

// One row per synchronization interval.
struct ExperimentRecord {
  double sim_time = 0.0;  // s, end of the interval
  std::int64_t step = 0;
  std::string strategy;
  double ratio = 1.0;
  double data_size = 0.0;  // bits placed on the bottleneck
  double rtt = 0.0;        // s
  double ebb = 0.0;        // bits/s
  double btlbw = 0.0;      // bits/s
  double rtprop = 0.0;     // s
  double bdp = 0.0;        // bits
  double loss = 0.0;
  double accuracy = 0.0;  // percent
  double samples_per_sec = 0.0;
  bool loss_event = false;

  bool operator==(const ExperimentRecord&) const = default;
};

}  // namespace netsense
