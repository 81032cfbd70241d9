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

#include "netsense/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netsense/error.hpp"

namespace netsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// floor(t / period) that never lands one below an exact multiple.
std::int64_t period_index(double t, double period) {
  auto idx = static_cast<std::int64_t>(std::floor(t / period));
  if (static_cast<double>(idx + 1) * period <= t) ++idx;
  if (static_cast<double>(idx) * period > t) --idx;
  return idx;
}

// Cycle containing t, judged on the same absolute boundaries
// (phase + k * period) that next_breakpoint reports.
std::int64_t cycle_index(double t, double phase, double period) {
  auto idx = static_cast<std::int64_t>(std::floor((t - phase) / period));
  if (phase + static_cast<double>(idx + 1) * period <= t) ++idx;
  if (phase + static_cast<double>(idx) * period > t) --idx;
  return idx;
}

}  // namespace

const char* to_string(CollectiveKind k) {
  return k == CollectiveKind::kRingAllReduceDense ? "ring_allreduce_dense"
                                                  : "allgather_sparse";
}

double collective_volume(const CollectiveModel& c, double payload_bits) {
  if (c.workers < 2) {
    throw ConfigError("collective_volume: need at least 2 workers");
  }
  const double n = static_cast<double>(c.workers);
  switch (c.kind) {
    case CollectiveKind::kRingAllReduceDense:
      return 2.0 * (n - 1.0) / n * payload_bits;
    case CollectiveKind::kAllGatherSparse:
      return (n - 1.0) * payload_bits;
  }
  return 0.0;
}

BandwidthSchedule BandwidthSchedule::fixed(double bps) {
  BandwidthSchedule s;
  s.kind = Kind::kStatic;
  s.level_bps = bps;
  return s;
}

BandwidthSchedule BandwidthSchedule::degrading(double start, double end,
                                               double step, double dwell) {
  BandwidthSchedule s;
  s.kind = Kind::kDegrading;
  s.start_bps = start;
  s.end_bps = end;
  s.step_bps = step;
  s.dwell_s = dwell;
  return s;
}

BandwidthSchedule BandwidthSchedule::fluctuating(double base,
                                                 std::vector<double> rates,
                                                 double on, double off,
                                                 double phase) {
  BandwidthSchedule s;
  s.kind = Kind::kFluctuating;
  s.level_bps = base;
  s.cross_rates_bps = std::move(rates);
  s.cross_on_s = on;
  s.cross_off_s = off;
  s.cross_phase_s = phase;
  return s;
}

const char* to_string(BandwidthSchedule::Kind k) {
  switch (k) {
    case BandwidthSchedule::Kind::kStatic:
      return "static";
    case BandwidthSchedule::Kind::kDegrading:
      return "degrading";
    case BandwidthSchedule::Kind::kFluctuating:
      return "fluctuating";
  }
  return "?";
}

LinkSchedule make_schedule(const BandwidthSchedule& spec) {
  LinkSchedule out;
  out.spec_ = spec;
  switch (spec.kind) {
    case BandwidthSchedule::Kind::kStatic:
      if (!(spec.level_bps > 0.0) || !std::isfinite(spec.level_bps)) {
        throw ConfigError("static schedule: level must be > 0");
      }
      out.levels_ = {spec.level_bps};
      break;
    case BandwidthSchedule::Kind::kDegrading: {
      if (!(spec.end_bps > 0.0)) {
        throw ConfigError("degrading schedule: end must be > 0");
      }
      if (spec.end_bps > spec.start_bps) {
        throw ConfigError("degrading schedule: end exceeds start");
      }
      if (!(spec.step_bps > 0.0) || !(spec.dwell_s > 0.0)) {
        throw ConfigError("degrading schedule: step and dwell must be > 0");
      }
      const double span = spec.start_bps - spec.end_bps;
      const auto steps = static_cast<std::int64_t>(
          std::floor(span / spec.step_bps + 1e-9));
      for (std::int64_t i = 0; i <= steps; ++i) {
        out.levels_.push_back(spec.start_bps -
                              static_cast<double>(i) * spec.step_bps);
      }
      if (out.levels_.back() - spec.end_bps > 1e-9 * spec.start_bps) {
        out.levels_.push_back(spec.end_bps);
      } else {
        out.levels_.back() = spec.end_bps;
      }
      break;
    }
    case BandwidthSchedule::Kind::kFluctuating:
      if (!(spec.level_bps > 0.0)) {
        throw ConfigError("fluctuating schedule: base level must be > 0");
      }
      if (spec.cross_rates_bps.empty()) {
        throw ConfigError("fluctuating schedule: no cross-traffic rates");
      }
      for (const double r : spec.cross_rates_bps) {
        if (!(r >= 0.0 && r < spec.level_bps)) {
          throw ConfigError(
              "fluctuating schedule: cross-traffic rate must be in "
              "[0, base)");
        }
      }
      if (!(spec.cross_on_s > 0.0) || !(spec.cross_off_s >= 0.0)) {
        throw ConfigError("fluctuating schedule: bad on/off periods");
      }
      out.levels_ = {spec.level_bps};
      break;
  }
  return out;
}

double LinkSchedule::capacity(double t) const {
  if (spec_.kind != BandwidthSchedule::Kind::kDegrading) return levels_[0];
  if (t < 0.0) return levels_.front();
  const auto idx = period_index(t, spec_.dwell_s);
  const auto last = static_cast<std::int64_t>(levels_.size()) - 1;
  return levels_[static_cast<std::size_t>(std::min(idx, last))];
}

double LinkSchedule::cross_traffic(double t) const {
  if (spec_.kind != BandwidthSchedule::Kind::kFluctuating) return 0.0;
  const double period = spec_.cross_on_s + spec_.cross_off_s;
  const auto cycle = cycle_index(t, spec_.cross_phase_s, period);
  const double cycle_start =
      spec_.cross_phase_s + static_cast<double>(cycle) * period;
  if (t >= cycle_start + spec_.cross_on_s) return 0.0;
  const auto n = static_cast<std::int64_t>(spec_.cross_rates_bps.size());
  const auto slot = ((cycle % n) + n) % n;
  return spec_.cross_rates_bps[static_cast<std::size_t>(slot)];
}

double LinkSchedule::service_rate(double t) const {
  return std::max(0.0, capacity(t) - cross_traffic(t));
}

double LinkSchedule::next_breakpoint(double t) const {
  switch (spec_.kind) {
    case BandwidthSchedule::Kind::kStatic:
      return kInf;
    case BandwidthSchedule::Kind::kDegrading: {
      if (t < 0.0) return 0.0;
      const auto idx = period_index(t, spec_.dwell_s);
      if (idx + 1 >= static_cast<std::int64_t>(levels_.size())) return kInf;
      return static_cast<double>(idx + 1) * spec_.dwell_s;
    }
    case BandwidthSchedule::Kind::kFluctuating: {
      const double period = spec_.cross_on_s + spec_.cross_off_s;
      const auto cycle = cycle_index(t, spec_.cross_phase_s, period);
      const double cycle_start =
          spec_.cross_phase_s + static_cast<double>(cycle) * period;
      const double on_end = cycle_start + spec_.cross_on_s;
      if (on_end > t && spec_.cross_off_s > 0.0) return on_end;
      return cycle_start + period;
    }
  }
  return kInf;
}

std::size_t LinkSchedule::level_count() const { return levels_.size(); }

double LinkSchedule::level(std::size_t i) const { return levels_.at(i); }

void LinkConfig::validate() const {
  if (!(prop_delay_s > 0.0) || !std::isfinite(prop_delay_s)) {
    throw ConfigError("link.prop_delay_s must be > 0");
  }
  if (!(queue_cap_bits >= 0.0)) {
    throw ConfigError("link.queue_cap_bits must be >= 0");
  }
  if (!(loss_recovery_rtts >= 0.0)) {
    throw ConfigError("link.loss_recovery_rtts must be >= 0");
  }
}

BottleneckLink::BottleneckLink(LinkSchedule schedule, const LinkConfig& cfg)
    : schedule_(std::move(schedule)), cfg_(cfg) {
  cfg_.validate();
  queue_cap_bits_ = cfg_.queue_cap_bits > 0.0
                        ? cfg_.queue_cap_bits
                        : 4.0 * schedule_.level(0) * base_rtt();
}

double BottleneckLink::drain_time(double bits, double from) const {
  double t = from;
  double remaining = bits;
  while (remaining > 0.0) {
    const double rate = schedule_.service_rate(t);
    const double next = schedule_.next_breakpoint(t);
    if (rate > 0.0) {
      const double finish = t + remaining / rate;
      if (finish <= next) return finish;
      remaining -= rate * (next - t);
    } else if (!std::isfinite(next)) {
      throw Error("bottleneck link stalled: zero service rate forever");
    }
    t = next;
  }
  return t;
}

double BottleneckLink::served_bits(double from, double until) const {
  double t = from;
  double served = 0.0;
  while (t < until) {
    const double next = std::min(schedule_.next_breakpoint(t), until);
    served += schedule_.service_rate(t) * (next - t);
    t = next;
  }
  return served;
}

void BottleneckLink::emit(double t, const char* type, double bits,
                          double depth) const {
  if (trace_ == nullptr) return;
  *trace_ << t << ',' << type << ',' << bits << ',' << depth << '\n';
}

void BottleneckLink::advance(double until) {
  if (until < now_) {
    throw Error("advance: cannot move the link clock backwards");
  }
  if (backlog_bits_ > 0.0) {
    const double served = served_bits(now_, until);
    const double drained = std::min(served, backlog_bits_);
    backlog_bits_ -= drained;
    if (backlog_bits_ <= 1e-9 * (drained + 1.0)) backlog_bits_ = 0.0;
    emit(until, "drain", drained, backlog_bits_);
  }
  now_ = until;
}

TransferResult BottleneckLink::transmit(double bits, double start_time) {
  if (!(bits > 0.0) || !std::isfinite(bits)) {
    throw Error("transmit: volume must be positive and finite");
  }
  advance(start_time);

  const double pipe = pipe_bits(start_time);
  TransferResult r;
  r.bits_on_bottleneck = bits;
  r.queue_depth_bits = std::max(0.0, backlog_bits_ - pipe);

  const double total = backlog_bits_ + bits;
  const double standing = std::max(0.0, total - pipe);
  r.delivered = standing <= queue_cap_bits_;
  const double finish = drain_time(total, start_time);
  r.rtt_s = std::max(base_rtt(), finish - start_time);
  if (!r.delivered) {
    r.rtt_s += cfg_.loss_recovery_rtts * base_rtt();
    emit(start_time, "drop", standing - queue_cap_bits_, queue_cap_bits_);
  }
  backlog_bits_ = total;
  emit(start_time, "enqueue", bits, std::min(standing, queue_cap_bits_));
  return r;
}

}  // namespace netsense
