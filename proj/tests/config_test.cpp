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

#include <gtest/gtest.h>

#include "netsense/error.hpp"

namespace netsense {
namespace {

TEST(Presets, AllParseAndValidate) {
  for (const auto& name : preset_names()) {
    ExperimentConfig cfg;
    ASSERT_NO_THROW(cfg = resolve_config(name)) << name;
    EXPECT_EQ(cfg.name, name);
    EXPECT_EQ(cfg.strategies.size(), 3u);
  }
}

TEST(Presets, StaticHasThreeLevels) {
  const auto cfg = resolve_config("static-bw");
  const auto cells = cfg.cells();
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].label, "20Mbps");
  EXPECT_EQ(cells[2].schedule.level_bps, 80e6);
}

TEST(Presets, DegradingIsTenLevelStaircase) {
  const auto cfg = resolve_config("degrading-bw");
  const auto cells = cfg.cells();
  ASSERT_EQ(cells.size(), 1u);
  const auto sched = make_schedule(cells[0].schedule);
  ASSERT_EQ(sched.level_count(), 10u);
  for (std::size_t i = 1; i < 10; ++i) {
    EXPECT_LT(sched.level(i), sched.level(i - 1));
  }
  EXPECT_DOUBLE_EQ(sched.level(0), 200e6);
  EXPECT_DOUBLE_EQ(sched.level(9), 20e6);
}

TEST(Parse, SectionsAndDefaults) {
  const auto cfg = parse_config(R"(
[experiment]
name = mine
strategies = netsense, allreduce_dense
seed = 7

[train]
learning_rate = 0.02
stop_at_target = yes

[controller]
alpha = 0.25
window = 5

[bandwidth]
schedule = static
levels_mbps = 10, 30
)");
  EXPECT_EQ(cfg.name, "mine");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.strategies,
            (std::vector<StrategyKind>{StrategyKind::kNetSense,
                                       StrategyKind::kAllReduceDense}));
  EXPECT_EQ(cfg.train.learning_rate, 0.02);
  EXPECT_TRUE(cfg.train.stop_at_target);
  EXPECT_EQ(cfg.train.strategy.controller.alpha, 0.25);
  EXPECT_EQ(cfg.train.strategy.controller.window, 5u);
  EXPECT_EQ(cfg.train.strategy.controller.beta2, 0.01);
  EXPECT_EQ(cfg.cells().size(), 2u);
}

TEST(Parse, UnknownKeyRejected) {
  EXPECT_THROW(parse_config("[train]\nlearning_rat = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("[nosuch]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("orphan = 1\n"), ConfigError);
}

TEST(Parse, BadValuesRejected) {
  EXPECT_THROW(parse_config("[train]\nlearning_rate = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("[train]\nmax_steps = -3\n"), ConfigError);
  EXPECT_THROW(parse_config("[train]\nstop_at_target = maybe\n"),
               ConfigError);
  EXPECT_THROW(parse_config("[controller]\nalpha = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nstrategies = sgd\n"), ConfigError);
  EXPECT_THROW(parse_config("[bandwidth]\nschedule = sine\n"), ConfigError);
  EXPECT_THROW(parse_config("[train]\nworkers = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[bandwidth]\nlevels_mbps = 10, 10\n"),
               ConfigError);
  EXPECT_THROW(parse_config("[experiment]\nstrategies = netsense, netsense\n"),
               ConfigError);
}

TEST(Parse, SyntaxErrorIsConfigError) {
  EXPECT_THROW(parse_config("[train\nx = 1\n"), ConfigError);
}

TEST(Override, AppliesDottedKey) {
  auto cfg = resolve_config("static-bw");
  apply_override(cfg, "train.max_steps=12");
  apply_override(cfg, " controller.beta2 = 0.02 ");
  EXPECT_EQ(cfg.train.max_steps, 12u);
  EXPECT_EQ(cfg.train.strategy.controller.beta2, 0.02);
}

TEST(Override, MalformedOrUnknownRejected) {
  auto cfg = resolve_config("static-bw");
  EXPECT_THROW(apply_override(cfg, "train.max_steps"), ConfigError);
  EXPECT_THROW(apply_override(cfg, "max_steps=3"), ConfigError);
  EXPECT_THROW(apply_override(cfg, "train.nope=3"), ConfigError);
  EXPECT_THROW(apply_override(cfg, "train.max_steps=abc"), ConfigError);
}

TEST(Render, RoundTrips) {
  auto cfg = resolve_config("fluctuating-bw");
  apply_override(cfg, "task.kind=mlp");
  apply_override(cfg, "compression.pruning=false");
  apply_override(cfg, "bandwidth.cross_phase_s=0.25");
  const auto again = parse_config(render_config(cfg));
  EXPECT_EQ(render_config(again), render_config(cfg));
  EXPECT_EQ(again.train.task.kind, TaskKind::kMlp);
  EXPECT_FALSE(again.train.strategy.compression.pruning);
  EXPECT_EQ(again.bandwidth.cross_phase_s, 0.25);
  EXPECT_EQ(again.bandwidth.cross_mbps, cfg.bandwidth.cross_mbps);
}

TEST(CellConfig, SeedAppliesToTaskAndBatches) {
  auto cfg = resolve_config("static-bw");
  cfg.seed = 42;
  const auto tc = cfg.cell_config(StrategyKind::kTopkStatic, cfg.cells()[1]);
  EXPECT_EQ(tc.seed, 42u);
  EXPECT_EQ(tc.task.seed, 42u);
  EXPECT_EQ(tc.strategy.kind, StrategyKind::kTopkStatic);
  EXPECT_EQ(tc.bandwidth.level_bps, 50e6);
}

TEST(Resolve, MissingFileIsConfigError) {
  EXPECT_THROW(resolve_config("/nonexistent/config.ini"), ConfigError);
}

}  // namespace
}  // namespace netsense
