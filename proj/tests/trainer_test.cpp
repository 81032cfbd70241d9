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

#include "netsense/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "netsense/error.hpp"

namespace netsense {
namespace {

TrainConfig small_config(StrategyKind kind, int workers = 2) {
  TrainConfig c;
  c.task.dimension = 500;
  c.task.signal_fraction = 0.02;
  c.workers = workers;
  c.strategy.kind = kind;
  c.bandwidth = BandwidthSchedule::fixed(1e9);
  c.max_steps = 50;
  return c;
}

TEST(SyncStep, DenseTwoWorkersIsFullGradientDescent) {
  const auto cfg = small_config(StrategyKind::kAllReduceDense);
  auto model = std::make_shared<QuadraticTask>(
      QuadraticTask::generate(cfg.task, cfg.workers));
  Trainer t(cfg, model);
  std::vector<double> w = model->initial_parameters();
  for (int s = 0; s < 40; ++s) {
    t.sync_step();
    const auto g = model->full_gradient(w);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= cfg.learning_rate * g[i];
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      ASSERT_NEAR(t.parameters()[i], w[i], 1e-12 * (1 + std::fabs(w[i])));
    }
  }
}

TEST(SyncStep, PinnedFullRatioMatchesDenseBitForBit) {
  auto dense_cfg = small_config(StrategyKind::kAllReduceDense, 4);
  dense_cfg.task.batch_noise = 0.1;
  auto ns_cfg = dense_cfg;
  ns_cfg.strategy.kind = StrategyKind::kNetSense;
  ns_cfg.strategy.pinned_ratio = 1.0;
  ns_cfg.strategy.compression.tr_q = 0.0;
  ns_cfg.strategy.compression.pruning = false;
  Trainer dense(dense_cfg), ns(ns_cfg);
  for (int s = 0; s < 30; ++s) {
    dense.sync_step();
    ns.sync_step();
    ASSERT_EQ(dense.parameters(), ns.parameters()) << "step " << s;
  }
}

TEST(SyncStep, UncongestedStartupClimbsToFullRatio) {
  auto cfg = small_config(StrategyKind::kNetSense);
  cfg.bandwidth = BandwidthSchedule::fixed(1e12);
  Trainer t(cfg);
  double expected = 0.01;
  for (int i = 0; i < 30; ++i) {
    const auto rec = t.sync_step();
    EXPECT_NEAR(rec.ratio, expected, 1e-12);
    expected = std::min(1.0, expected + 0.05);
  }
  EXPECT_EQ(t.controller().phase, Phase::kStartup);
  EXPECT_EQ(t.ratio(), 1.0);
}

TEST(SyncStep, LargeBdpEstimateClimbsByBeta2) {
  auto cfg = small_config(StrategyKind::kNetSense);
  cfg.bandwidth = BandwidthSchedule::fixed(1e12);
  cfg.strategy.controller.window = 200;
  Trainer t(cfg);
  // One line-rate sample seeds a huge BtlBw that stays in the window.
  auto s = ControllerState::initial(cfg.strategy.controller);
  s = update_estimates(s, {-1, 1e12 * 0.004, 0.004, false});
  s.phase = Phase::kNetSense;
  s.ratio = 0.1;
  t.set_controller_state(s);
  double expected = 0.1;
  for (int i = 0; i < 100; ++i) {
    const auto rec = t.sync_step();
    ASSERT_NEAR(rec.ratio, expected, 1e-12) << i;
    expected = std::min(1.0, expected + 0.01);
  }
  EXPECT_EQ(t.ratio(), 1.0);
}

TEST(SyncStep, OverloadedRatioHalvesToFloor) {
  auto cfg = small_config(StrategyKind::kNetSense);
  cfg.bandwidth = BandwidthSchedule::fixed(1e5);
  cfg.link.queue_cap_bits = 1e9;
  Trainer t(cfg);
  auto s = ControllerState::initial(cfg.strategy.controller);
  s.phase = Phase::kNetSense;
  s.ratio = 0.1;
  t.set_controller_state(s);
  const std::vector<double> expected{0.05, 0.025, 0.0125, 0.00625, 0.005,
                                     0.005};
  for (const double r : expected) {
    t.sync_step();
    EXPECT_DOUBLE_EQ(t.ratio(), r);
  }
}

TEST(SyncStep, WallClockIsComputePlusCommunication) {
  auto cfg = small_config(StrategyKind::kTopkStatic, 4);
  cfg.bandwidth = BandwidthSchedule::fixed(2e6);
  Trainer t(cfg);
  double expected = 0.0;
  for (int i = 0; i < 25; ++i) {
    const auto rec = t.sync_step();
    expected += cfg.compute_time_s + cfg.codec_overhead_s;
    expected += rec.rtt;
    EXPECT_EQ(t.wall_clock(), expected);
    EXPECT_EQ(rec.sim_time, expected);
  }
}

TEST(SyncStep, ThroughputClosedForm) {
  auto cfg = small_config(StrategyKind::kAllReduceDense);
  cfg.task.dimension = 1000;
  cfg.bandwidth = BandwidthSchedule::fixed(4e6);
  Trainer t(cfg);
  // Ring volume for N=2 equals the dense payload: 1000 * 32 bits.
  const double volume = 32000.0;
  const double rtt = std::max(2 * cfg.link.prop_delay_s, volume / 4e6);
  for (int i = 0; i < 5; ++i) {
    const auto rec = t.sync_step();
    EXPECT_EQ(rec.data_size, volume);
    EXPECT_DOUBLE_EQ(rec.rtt, rtt);
    EXPECT_DOUBLE_EQ(rec.samples_per_sec,
                     32.0 * 2 / (cfg.compute_time_s + rtt));
    EXPECT_FALSE(rec.loss_event);
  }
}

TEST(RunTraining, DenseLossMonotone) {
  auto cfg = small_config(StrategyKind::kAllReduceDense, 4);
  cfg.max_steps = 100;
  const auto r = run_training(cfg);
  double prev = r.initial_loss;
  for (const auto& rec : r.records) {
    EXPECT_LT(rec.loss, prev);
    prev = rec.loss;
  }
}

TEST(RunTraining, StopsAtTarget) {
  auto cfg = small_config(StrategyKind::kAllReduceDense);
  cfg.max_steps = 1000;
  cfg.target_accuracy = 90.0;
  cfg.stop_at_target = true;
  const auto r = run_training(cfg);
  ASSERT_FALSE(r.records.empty());
  EXPECT_LT(r.records.size(), 1000u);
  EXPECT_GE(r.records.back().accuracy, 90.0);
  EXPECT_LT(r.records[r.records.size() - 2].accuracy, 90.0);
}

TEST(RunTraining, StopsAtSimTimeBudget) {
  auto cfg = small_config(StrategyKind::kAllReduceDense);
  cfg.max_steps = 100000;
  cfg.max_sim_time_s = 0.5;
  const auto r = run_training(cfg);
  EXPECT_GE(r.records.back().sim_time, 0.5);
  EXPECT_LT(r.records[r.records.size() - 2].sim_time, 0.5);
}

TEST(RunTraining, ErrorFeedbackConservesGradient) {
  auto cfg = small_config(StrategyKind::kTopkStatic, 3);
  cfg.bandwidth = BandwidthSchedule::fixed(1e7);
  Trainer t(cfg);
  const std::size_t d = t.model().dimension();
  std::vector<std::vector<double>> raw(3, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> sent = raw;
  t.set_observer([&](int w, const GradientVector& g,
                     const GradientVector& tx) {
    for (std::size_t i = 0; i < d; ++i) {
      raw[w][i] += g[i];
      sent[w][i] += tx[i];
    }
  });
  for (int s = 0; s < 60; ++s) t.sync_step();
  for (int w = 0; w < 3; ++w) {
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_NEAR(sent[w][i] + t.residual(w)[i], raw[w][i],
                  1e-12 * (1 + std::fabs(raw[w][i])));
    }
  }
}

TEST(RunTraining, TopkWithoutFeedbackKeepsNoResidual) {
  auto cfg = small_config(StrategyKind::kTopkStatic);
  cfg.strategy.error_feedback = false;
  Trainer t(cfg);
  for (int s = 0; s < 5; ++s) t.sync_step();
  EXPECT_EQ(t.residual(0), ResidualBuffer(t.model().dimension()));
}

TEST(RunTraining, BaselineRatiosAreFixed) {
  for (auto kind : {StrategyKind::kTopkStatic, StrategyKind::kAllReduceDense}) {
    auto cfg = small_config(kind);
    cfg.max_steps = 10;
    for (const auto& rec : run_training(cfg).records) {
      EXPECT_EQ(rec.ratio, kind == StrategyKind::kTopkStatic ? 0.1 : 1.0);
      EXPECT_EQ(rec.strategy, to_string(kind));
    }
  }
}

TEST(TrainConfig, Validation) {
  auto cfg = small_config(StrategyKind::kNetSense);
  EXPECT_NO_THROW(cfg.validate());
  cfg.workers = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config(StrategyKind::kNetSense);
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small_config(StrategyKind::kNetSense);
  cfg.strategy.topk_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(Trainer{cfg}, ConfigError);
}

TEST(Strategy, NamesRoundTrip) {
  for (auto k : {StrategyKind::kNetSense, StrategyKind::kTopkStatic,
                 StrategyKind::kAllReduceDense}) {
    EXPECT_EQ(parse_strategy_kind(to_string(k)), k);
  }
  EXPECT_EQ(collective_for(StrategyKind::kAllReduceDense),
            CollectiveKind::kRingAllReduceDense);
  EXPECT_EQ(collective_for(StrategyKind::kTopkStatic),
            CollectiveKind::kAllGatherSparse);
}

}  // namespace
}  // namespace netsense
