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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "netsense/error.hpp"

namespace netsense {
namespace {

IntervalMeasurement meas(std::int64_t i, double bits, double rtt,
                         bool loss = false) {
  return {i, bits, rtt, loss};
}

ControllerState in_netsense(double ratio) {
  ControllerState s = ControllerState::initial(ControllerConfig{});
  s.phase = Phase::kNetSense;
  s.ratio = ratio;
  return s;
}

TEST(MeasureEbb, DirectDivision) {
  EXPECT_EQ(measure_ebb(meas(0, 1e6, 0.01)), 1e8);
}

TEST(MeasureEbb, UncongestedFraction) {
  const double btlbw = 1e8, rtprop = 0.004;
  const double bdp = btlbw * rtprop;
  EXPECT_DOUBLE_EQ(measure_ebb(meas(0, 0.9 * bdp, rtprop)), 0.9 * btlbw);
}

TEST(MeasureEbb, RandomPairsMatchDivision) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> bits(1.0, 1e9), rtt(1e-4, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double b = bits(rng), r = rtt(rng);
    EXPECT_EQ(measure_ebb(meas(i, b, r)), b / r);
  }
}

TEST(MeasureEbb, BadInputsThrow) {
  EXPECT_THROW(measure_ebb(meas(0, 1.0, 0.0)), MeasurementError);
  EXPECT_THROW(measure_ebb(meas(0, -1.0, 0.1)), MeasurementError);
}

TEST(Estimates, SingletonWindow) {
  auto s = update_estimates(ControllerState::initial({}), meas(0, 500, 0.01));
  EXPECT_EQ(btlbw(s), 50000.0);
  EXPECT_EQ(rtprop(s), 0.01);
}

TEST(Estimates, MaxOfWindow) {
  auto s = ControllerState::initial({});
  s = update_estimates(s, meas(0, 5, 1));
  s = update_estimates(s, meas(1, 9, 1));
  s = update_estimates(s, meas(2, 7, 1));
  EXPECT_EQ(btlbw(s), 9.0);
}

TEST(Estimates, SlidingWindowReplay) {
  // 15 intervals, capacity drops at interval 8. Oracle: explicit max/min
  // over the last W raw samples.
  std::vector<double> ebb, rtt;
  auto s = ControllerState::initial({});
  for (int i = 0; i < 15; ++i) {
    const double bw = i < 8 ? 100.0 : 40.0;
    const double r = 0.01 + 0.001 * (i % 3);
    ebb.push_back(bw);
    rtt.push_back(r);
    s = update_estimates(s, meas(i, bw * r, r));
    const std::size_t lo = ebb.size() > 10 ? ebb.size() - 10 : 0;
    const double want_bw = *std::max_element(ebb.begin() + lo, ebb.end());
    const double want_rt = *std::min_element(rtt.begin() + lo, rtt.end());
    EXPECT_DOUBLE_EQ(btlbw(s), want_bw) << i;
    EXPECT_DOUBLE_EQ(rtprop(s), want_rt) << i;
  }
  EXPECT_DOUBLE_EQ(btlbw(s), 100.0);  // interval 7 is still inside
  s = update_estimates(s, meas(15, 40 * 0.01, 0.01));
  s = update_estimates(s, meas(16, 40 * 0.01, 0.01));
  s = update_estimates(s, meas(17, 40 * 0.01, 0.01));
  EXPECT_DOUBLE_EQ(btlbw(s), 40.0);
}

TEST(Estimates, EvictionIsByIntervalIndex) {
  auto s = ControllerState::initial({});
  s = update_estimates(s, meas(0, 1000, 1));
  s = update_estimates(s, meas(20, 10, 1));  // gap larger than W
  EXPECT_EQ(btlbw(s), 10.0);
  EXPECT_EQ(s.btlbw_window.size(), 1u);
}

TEST(Bdp, Products) {
  auto s = update_estimates(ControllerState::initial({}),
                            meas(0, 1e8 * 0.005, 0.005));
  EXPECT_DOUBLE_EQ(compute_bdp(s), 5e5);
  s = update_estimates(ControllerState::initial({}), meas(0, 2e8 * 0.01, 0.01));
  EXPECT_DOUBLE_EQ(compute_bdp(s), 2e6);
}

TEST(Bdp, RandomStreamMatchesWindowOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> bits(1e3, 1e7), rtt(1e-3, 0.1);
  std::vector<double> e, r;
  auto s = ControllerState::initial({});
  for (int i = 0; i < 200; ++i) {
    const double b = bits(rng), t = rtt(rng);
    e.push_back(b / t);
    r.push_back(t);
    s = update_estimates(s, meas(i, b, t));
    const std::size_t lo = e.size() > 10 ? e.size() - 10 : 0;
    EXPECT_EQ(compute_bdp(s),
              *std::max_element(e.begin() + lo, e.end()) *
                  *std::min_element(r.begin() + lo, r.end()));
  }
}

TEST(Bdp, NotReadyBeforeFirstSample) {
  const auto s = ControllerState::initial({});
  EXPECT_FALSE(s.ready());
  EXPECT_THROW(compute_bdp(s), NotReadyError);
  EXPECT_THROW(btlbw(s), NotReadyError);
  EXPECT_THROW(rtprop(s), NotReadyError);
}

TEST(Startup, AddsBeta1) {
  const auto s = startup_step(ControllerState::initial({}), false);
  EXPECT_DOUBLE_EQ(s.ratio, 0.06);
  EXPECT_EQ(s.phase, Phase::kStartup);
}

TEST(Startup, ClampsAtOne) {
  auto s = ControllerState::initial({});
  s.ratio = 0.98;
  EXPECT_EQ(startup_step(s, false).ratio, 1.0);
}

TEST(Startup, CongestionEndsStartup) {
  const auto s = startup_step(ControllerState::initial({}), true);
  EXPECT_EQ(s.phase, Phase::kNetSense);
  EXPECT_EQ(s.ratio, 0.01);
  EXPECT_THROW(startup_step(s, false), Error);
}

TEST(AdjustRatio, HalvesOverThreshold) {
  auto s = update_estimates(in_netsense(0.1), meas(0, 1000, 0.01));
  EXPECT_EQ(adjust_ratio(s, 901).ratio, 0.05);
}

TEST(AdjustRatio, FloorAt0005) {
  auto s = update_estimates(in_netsense(0.008), meas(0, 1000, 0.01));
  EXPECT_EQ(adjust_ratio(s, 2000).ratio, 0.005);
}

TEST(AdjustRatio, AdditiveIncreaseClamped) {
  auto s = update_estimates(in_netsense(0.995), meas(0, 1000, 0.01));
  EXPECT_EQ(adjust_ratio(s, 100).ratio, 1.0);
}

TEST(AdjustRatio, ExactlyAtThresholdIncreases) {
  auto s = update_estimates(in_netsense(0.2), meas(0, 1000, 0.01));
  EXPECT_DOUBLE_EQ(adjust_ratio(s, 0.9 * compute_bdp(s)).ratio, 0.21);
}

TEST(AdjustRatio, RejectedDuringStartup) {
  auto s = update_estimates(ControllerState::initial({}), meas(0, 1, 1));
  EXPECT_THROW(adjust_ratio(s, 0.0), Error);
}

TEST(Congestion, Threshold) {
  auto s = update_estimates(ControllerState::initial({}), meas(0, 1, 0.004));
  EXPECT_FALSE(congestion_detected(s, meas(1, 1, 0.004)));
  EXPECT_TRUE(congestion_detected(s, meas(1, 1, 0.008)));
  EXPECT_FALSE(congestion_detected(s, meas(1, 1, 0.005)));
  EXPECT_TRUE(congestion_detected(s, meas(1, 1, 0.0050001)));
  EXPECT_TRUE(congestion_detected(s, meas(1, 1, 0.004, true)));
}

TEST(OnInterval, RatioStaysInBounds) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto s = ControllerState::initial({});
  for (int i = 0; i < 2000; ++i) {
    const double bits = 1e6 * u(rng);
    const double rtt = 0.004 + 0.02 * u(rng);
    s = on_interval(s, meas(i, bits, rtt, u(rng) < 0.05),
                    [&](double r) { return 2e6 * r * u(rng); });
    ASSERT_GE(s.ratio, 0.005);
    ASSERT_LE(s.ratio, 1.0);
  }
}

TEST(OnInterval, StartupThenSawtooth) {
  // Fixed pipe: BDP = 1000 bits at 1e5 b/s and 10 ms; volume = 10^4 * ratio.
  const double cap = 1e5, base = 0.01;
  const auto volume = [](double r) { return 1e4 * r; };
  auto rtt_of = [&](double bits) { return std::max(base, bits / cap); };
  auto s = ControllerState::initial({});
  std::vector<double> ratios, bdps;
  for (int i = 0; i < 60; ++i) {
    const double bits = volume(s.ratio);
    s = on_interval(s, meas(i, bits, rtt_of(bits)), volume);
    ratios.push_back(s.ratio);
    bdps.push_back(compute_bdp(s));
  }
  EXPECT_EQ(s.phase, Phase::kNetSense);
  // Startup: 0.01 -> 0.06 -> 0.11 -> 0.16; 0.16 gives rtt 16 ms > 12.5 ms.
  EXPECT_DOUBLE_EQ(ratios[0], 0.06);
  EXPECT_DOUBLE_EQ(ratios[1], 0.11);
  EXPECT_DOUBLE_EQ(ratios[2], 0.16);
  EXPECT_DOUBLE_EQ(ratios[3], 0.16);
  // The estimate never exceeds the pipe and settles near the largest
  // payload sent (0.8 of the pipe); the sawtooth tracks the estimate.
  for (std::size_t i = 30; i < ratios.size(); ++i) {
    EXPECT_LE(bdps[i], 1000.0 + 1e-9);
    EXPECT_GE(bdps[i], 800.0 - 1e-9);
    EXPECT_GE(volume(ratios[i]), 0.45 * 0.9 * bdps[i] - 1e-9);
    EXPECT_LE(volume(ratios[i]), 0.9 * bdps[i] + 100 + 1e-9);
    EXPECT_GE(volume(ratios[i]), 0.4 * 1000 - 1e-9);
  }
}

TEST(ControllerConfig, Validation) {
  ControllerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.window = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.ratio_init = 0.001;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace netsense
