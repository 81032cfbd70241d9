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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netsense/compressor.hpp"
#include "netsense/controller.hpp"
#include "netsense/grad.hpp"
#include "netsense/netsim.hpp"
#include "netsense/record.hpp"
#include "netsense/tasks.hpp"

namespace netsense {

enum class StrategyKind { kNetSense, kTopkStatic, kAllReduceDense };

const char* to_string(StrategyKind k);
StrategyKind parse_strategy_kind(const std::string& s);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kNetSense;
  double topk_rate = 0.1;       // topk_static only
  bool error_feedback = true;   // topk_static only; netsense always keeps it
  double pinned_ratio = 0.0;    // netsense: > 0 freezes the ratio
  CompressionConfig compression;
  ControllerConfig controller;

  void validate() const;
};

CollectiveKind collective_for(StrategyKind k);

struct TrainConfig {
  TaskConfig task;
  StrategyConfig strategy;
  BandwidthSchedule bandwidth = BandwidthSchedule::fixed(100e6);
  LinkConfig link;

  int workers = 8;
  std::size_t batch = 32;
  double learning_rate = 0.05;
  double compute_time_s = 0.005;
  // Select/encode/decode cost per step, charged to sparse strategies only.
  double codec_overhead_s = 0.0015;

  std::size_t max_steps = 1000;
  double max_sim_time_s = 0.0;  // > 0 also stops once wall clock passes it
  double target_accuracy = 99.0;  // percent
  double target_loss = 0.0;       // <= 0 disables the loss target
  bool stop_at_target = false;
  std::uint64_t seed = 1;

  void validate() const;
};

// Per-worker hook: raw local gradient and the dense form of what was sent.
using TransmitObserver =
    std::function<void(int worker, const GradientVector& raw,
                        const GradientVector& transmitted)>;

class Trainer {
 public:
  explicit Trainer(const TrainConfig& cfg);
  Trainer(const TrainConfig& cfg, std::shared_ptr<const ToyModel> model);

  // One synchronization interval; returns its record.
  ExperimentRecord sync_step();

  bool target_reached() const;

  const TrainConfig& config() const { return cfg_; }
  const ToyModel& model() const { return *model_; }
  std::int64_t step() const { return step_; }
  double wall_clock() const { return wall_; }
  double ratio() const { return controller_.ratio; }
  const ControllerState& controller() const { return controller_; }
  const std::vector<double>& parameters() const { return params_; }
  const ResidualBuffer& residual(int worker) const;
  const BottleneckLink& link() const { return link_; }
  double last_compute_s() const { return last_compute_s_; }

  // Bits the collective would move for this strategy at `ratio`.
  double predicted_volume_bits(double ratio) const;

  void set_observer(TransmitObserver obs) { observer_ = std::move(obs); }
  // Replaces the controller, e.g. to begin past startup.
  void set_controller_state(ControllerState s) { controller_ = std::move(s); }
  void set_trace(std::ostream* out) { link_.set_trace(out); }

 private:
  double step_compute_s() const;

  TrainConfig cfg_;
  std::shared_ptr<const ToyModel> model_;
  BottleneckLink link_;
  CollectiveModel collective_;
  ControllerState controller_;
  std::vector<double> params_;
  std::vector<ResidualBuffer> residuals_;
  std::int64_t step_ = 0;
  double wall_ = 0.0;
  double last_loss_ = 0.0;
  double last_accuracy_ = 0.0;
  double last_compute_s_ = 0.0;
  TransmitObserver observer_;
};

struct RunResult {
  std::vector<ExperimentRecord> records;
  double initial_loss = 0.0;
  double initial_accuracy = 0.0;
};

// Runs until the step or time budget, or the target when stop_at_target is
// set.
RunResult run_training(const TrainConfig& cfg);
RunResult run_training(Trainer& trainer);

}  // namespace netsense
