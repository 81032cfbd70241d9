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

#include <cmath>

#include "netsense/error.hpp"

namespace netsense {

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::kNetSense:
      return "netsense";
    case StrategyKind::kTopkStatic:
      return "topk_static";
    case StrategyKind::kAllReduceDense:
      return "allreduce_dense";
  }
  return "?";
}

StrategyKind parse_strategy_kind(const std::string& s) {
  if (s == "netsense") return StrategyKind::kNetSense;
  if (s == "topk_static") return StrategyKind::kTopkStatic;
  if (s == "allreduce_dense") return StrategyKind::kAllReduceDense;
  throw ConfigError("unknown strategy '" + s + "'");
}

CollectiveKind collective_for(StrategyKind k) {
  return k == StrategyKind::kAllReduceDense
             ? CollectiveKind::kRingAllReduceDense
             : CollectiveKind::kAllGatherSparse;
}

void StrategyConfig::validate() const {
  if (!(topk_rate > 0.0 && topk_rate <= 1.0)) {
    throw ConfigError("strategy.topk_rate must be in (0, 1]");
  }
  if (!(pinned_ratio >= 0.0 && pinned_ratio <= 1.0)) {
    throw ConfigError("strategy.pinned_ratio must be in [0, 1]");
  }
  compression.validate();
  controller.validate();
}

void TrainConfig::validate() const {
  task.validate();
  strategy.validate();
  link.validate();
  make_schedule(bandwidth);
  if (workers < 2) throw ConfigError("train.workers must be >= 2");
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train.learning_rate must be positive");
  }
  if (!(compute_time_s >= 0.0) || !(codec_overhead_s >= 0.0)) {
    throw ConfigError("train: compute and codec times must be >= 0");
  }
  if (max_steps < 1) throw ConfigError("train.max_steps must be >= 1");
  if (!(max_sim_time_s >= 0.0)) {
    throw ConfigError("train.max_sim_time_s must be >= 0");
  }
}

Trainer::Trainer(const TrainConfig& cfg)
    : Trainer(cfg, std::shared_ptr<const ToyModel>(
                       make_model(cfg.task, cfg.workers))) {}

Trainer::Trainer(const TrainConfig& cfg, std::shared_ptr<const ToyModel> model)
    : cfg_(cfg),
      model_(std::move(model)),
      link_((cfg.validate(), make_schedule(cfg.bandwidth)), cfg.link),
      collective_{collective_for(cfg.strategy.kind), cfg.workers},
      controller_(ControllerState::initial(cfg.strategy.controller)) {
  if (!model_) throw ConfigError("Trainer: null model");
  params_ = model_->initial_parameters();
  residuals_.assign(static_cast<std::size_t>(cfg_.workers),
                    ResidualBuffer(model_->dimension()));
  last_loss_ = model_->loss(params_);
  last_accuracy_ = model_->accuracy(params_);
}

const ResidualBuffer& Trainer::residual(int worker) const {
  return residuals_.at(static_cast<std::size_t>(worker));
}

double Trainer::step_compute_s() const {
  const bool sparse = cfg_.strategy.kind != StrategyKind::kAllReduceDense;
  return cfg_.compute_time_s + (sparse ? cfg_.codec_overhead_s : 0.0);
}

double Trainer::predicted_volume_bits(double ratio) const {
  const std::size_t dim = model_->dimension();
  const auto& s = cfg_.strategy;
  double bytes = 0.0;
  switch (s.kind) {
    case StrategyKind::kNetSense:
      bytes = static_cast<double>(
          predicted_wire_bytes(dim, ratio, s.compression));
      break;
    case StrategyKind::kTopkStatic:
      bytes = static_cast<double>(payload_wire_bytes(
          kept_count(s.topk_rate, dim), Precision::kFull32, s.compression));
      break;
    case StrategyKind::kAllReduceDense:
      bytes = static_cast<double>(dim) * value_width_bytes(Precision::kFull32);
      break;
  }
  return collective_volume(collective_, 8.0 * bytes);
}

ExperimentRecord Trainer::sync_step() {
  const std::size_t dim = model_->dimension();
  const auto& strat = cfg_.strategy;
  const double ratio = strat.kind == StrategyKind::kNetSense
                           ? (strat.pinned_ratio > 0.0 ? strat.pinned_ratio
                                                       : controller_.ratio)
                       : strat.kind == StrategyKind::kTopkStatic
                           ? strat.topk_rate
                           : 1.0;

  std::vector<double> sum(dim, 0.0);
  double payload_bits = 0.0;
  const std::uint64_t batch_seed =
      mix_seed(cfg_.seed, static_cast<std::uint64_t>(step_));

  for (int w = 0; w < cfg_.workers; ++w) {
    GradientVector g =
        model_->local_gradient(params_, w, batch_seed, cfg_.batch);
    g.set_step_index(step_);
    auto& residual = residuals_[static_cast<std::size_t>(w)];

    GradientVector tx;
    double bits = 0.0;
    switch (strat.kind) {
      case StrategyKind::kNetSense: {
        CompressResult c =
            compress(g, residual, params_, ratio, strat.compression);
        residual = std::move(c.residual);
        bits = 8.0 * static_cast<double>(
                         c.payload.wire_size_bytes(strat.compression));
        tx = densify(c.payload, dim);
        break;
      }
      case StrategyKind::kTopkStatic: {
        const GradientVector acc =
            strat.error_feedback ? accumulate(g, residual) : g;
        const CompressedPayload p = topk_sparsify(acc, ratio);
        bits = 8.0 * static_cast<double>(p.wire_size_bytes(strat.compression));
        tx = densify(p, dim);
        if (strat.error_feedback) residual = update_residual(acc, tx);
        break;
      }
      case StrategyKind::kAllReduceDense:
        bits = 8.0 * static_cast<double>(dim) *
               value_width_bytes(Precision::kFull32);
        tx = g;
        break;
    }
    if (observer_) observer_(w, g, tx);
    payload_bits = std::max(payload_bits, bits);
    const auto v = tx.values();
    for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
  }

  const double volume = collective_volume(collective_, payload_bits);
  const double compute = step_compute_s();
  const double start = wall_ + compute;
  const TransferResult tr = link_.transmit(volume, start);

  IntervalMeasurement m;
  m.interval_index = step_;
  m.data_size_bits = volume;
  m.rtt_s = tr.rtt_s;
  m.loss = !tr.delivered;
  if (strat.kind == StrategyKind::kNetSense && strat.pinned_ratio <= 0.0) {
    controller_ = on_interval(std::move(controller_), m, [this](double r) {
      return predicted_volume_bits(r);
    });
  } else {
    controller_ = update_estimates(std::move(controller_), m);
  }

  const double n = static_cast<double>(cfg_.workers);
  for (std::size_t i = 0; i < dim; ++i) {
    params_[i] -= cfg_.learning_rate * (sum[i] / n);
  }

  wall_ += compute;
  wall_ += tr.rtt_s;
  last_compute_s_ = compute;
  ++step_;
  last_loss_ = model_->loss(params_);
  last_accuracy_ = model_->accuracy(params_);

  ExperimentRecord rec;
  rec.sim_time = wall_;
  rec.step = step_;
  rec.strategy = to_string(strat.kind);
  rec.ratio = ratio;
  rec.data_size = volume;
  rec.rtt = tr.rtt_s;
  rec.ebb = measure_ebb(m);
  rec.btlbw = btlbw(controller_);
  rec.rtprop = rtprop(controller_);
  rec.bdp = compute_bdp(controller_);
  rec.loss = last_loss_;
  rec.accuracy = last_accuracy_;
  rec.samples_per_sec =
      static_cast<double>(cfg_.batch) * n / (compute + tr.rtt_s);
  rec.loss_event = !tr.delivered;
  return rec;
}

bool Trainer::target_reached() const {
  if (last_accuracy_ >= cfg_.target_accuracy) return true;
  return cfg_.target_loss > 0.0 && last_loss_ <= cfg_.target_loss;
}

RunResult run_training(Trainer& trainer) {
  RunResult out;
  out.initial_loss = trainer.model().loss(trainer.parameters());
  out.initial_accuracy = trainer.model().accuracy(trainer.parameters());
  const std::size_t budget = trainer.config().max_steps;
  out.records.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) {
    out.records.push_back(trainer.sync_step());
    if (trainer.config().stop_at_target && trainer.target_reached()) break;
    const double limit = trainer.config().max_sim_time_s;
    if (limit > 0.0 && trainer.wall_clock() >= limit) break;
  }
  return out;
}

RunResult run_training(const TrainConfig& cfg) {
  Trainer trainer(cfg);
  return run_training(trainer);
}

}  // namespace netsense
