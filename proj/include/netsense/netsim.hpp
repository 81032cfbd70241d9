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

// Fluid model of the shared bottleneck between the training workers and the
// switch, plus the collective cost models that map a per-worker payload onto
// bits crossing that bottleneck.
//
// Service model. The link serves its FIFO at the residual rate
// s(t) = max(0, capacity(t) - cross_traffic(t)). A round of L bits issued at
// t0 behind a backlog Q completes at
//
//   rtt = max(base_rtt, T(Q + L))   (+ one recovery RTT on overflow)
//
// where T(x) is the time the schedule needs to serve x bits from t0 and
// base_rtt = 2 * prop_delay. Volumes that fit in the pipe (s * base_rtt) see
// a flat base RTT; larger volumes stand in the queue and stretch the round
// at 1/s per bit. Bits beyond pipe + queue_cap overflow: the round is
// reported lost and the excess is retransmitted behind the queue.

#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace netsense {

enum class CollectiveKind { kRingAllReduceDense, kAllGatherSparse };

const char* to_string(CollectiveKind k);

struct CollectiveModel {
  CollectiveKind kind = CollectiveKind::kRingAllReduceDense;
  int workers = 2;
};

// Bits one worker moves through its link per round:
//   ring allreduce: 2 (N - 1) / N * payload
//   allgather:      (N - 1) * payload
double collective_volume(const CollectiveModel& c, double payload_bits);

struct BandwidthSchedule {
  enum class Kind { kStatic, kDegrading, kFluctuating };
  Kind kind = Kind::kStatic;

  double level_bps = 0.0;  // static level, or fluctuating base capacity

  // Degrading staircase: start, start - step, ... down to end, each held for
  // dwell seconds; end is held forever.
  double start_bps = 0.0;
  double end_bps = 0.0;
  double step_bps = 0.0;
  double dwell_s = 0.0;

  // Fluctuating: competing traffic switched on for cross_on_s then off for
  // cross_off_s, repeating. Successive on-periods cycle through
  // cross_rates_bps. cross_phase_s shifts the cycle start.
  std::vector<double> cross_rates_bps;
  double cross_on_s = 0.0;
  double cross_off_s = 0.0;
  double cross_phase_s = 0.0;

  static BandwidthSchedule fixed(double bps);
  static BandwidthSchedule degrading(double start, double end, double step,
                                     double dwell);
  static BandwidthSchedule fluctuating(double base, std::vector<double> rates,
                                       double on, double off,
                                       double phase = 0.0);
};

const char* to_string(BandwidthSchedule::Kind k);

// Piecewise-constant capacity and cross-traffic functions of time.
class LinkSchedule {
 public:
  LinkSchedule() = default;

  double capacity(double t) const;
  double cross_traffic(double t) const;
  double service_rate(double t) const;

  // Smallest breakpoint strictly after t, +inf when the rates never change.
  double next_breakpoint(double t) const;

  // Number of distinct capacity levels (1 for static and fluctuating).
  std::size_t level_count() const;
  double level(std::size_t i) const;

  const BandwidthSchedule& spec() const { return spec_; }

 private:
  friend LinkSchedule make_schedule(const BandwidthSchedule& spec);
  BandwidthSchedule spec_;
  std::vector<double> levels_;
};

// Throws ConfigError on an inconsistent spec.
LinkSchedule make_schedule(const BandwidthSchedule& spec);

struct LinkConfig {
  double prop_delay_s = 0.002;  // one-way
  // Bottleneck buffer beyond the pipe. 0 selects 4x the BDP of the first
  // capacity level.
  double queue_cap_bits = 0.0;
  double loss_recovery_rtts = 1.0;

  void validate() const;
};

struct TransferResult {
  double rtt_s = 0.0;
  bool delivered = true;
  double bits_on_bottleneck = 0.0;
  double queue_depth_bits = 0.0;  // standing queue when the round was issued
};

class BottleneckLink {
 public:
  BottleneckLink(LinkSchedule schedule, const LinkConfig& cfg);

  // Issues a round at start_time (>= now()). The link is advanced to
  // start_time first; the transfer itself is enqueued, not drained.
  TransferResult transmit(double bits, double start_time);

  // Drains the FIFO up to `until` (>= now()).
  void advance(double until);

  double now() const { return now_; }
  double backlog_bits() const { return backlog_bits_; }
  double base_rtt() const { return 2.0 * cfg_.prop_delay_s; }
  double queue_cap_bits() const { return queue_cap_bits_; }
  double pipe_bits(double t) const {
    return schedule_.service_rate(t) * base_rtt();
  }
  const LinkSchedule& schedule() const { return schedule_; }

  // Time at which `bits` have been served when service starts at `from`.
  double drain_time(double bits, double from) const;
  // Bits served over [from, until].
  double served_bits(double from, double until) const;

  // One line per event: time,type,bits,queue_depth.
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  void emit(double t, const char* type, double bits, double depth) const;

  LinkSchedule schedule_;
  LinkConfig cfg_;
  double queue_cap_bits_ = 0.0;
  double now_ = 0.0;
  double backlog_bits_ = 0.0;
  std::ostream* trace_ = nullptr;
};

}  // namespace netsense
