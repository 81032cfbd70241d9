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

#include "netsense/metrics.hpp"

#include "netsense/error.hpp"

namespace netsense {

std::optional<double> compute_tta(std::span<const ExperimentRecord> records,
                                  double target_accuracy) {
  for (const auto& r : records) {
    if (r.accuracy >= target_accuracy) return r.sim_time;
  }
  return std::nullopt;
}

std::optional<std::size_t> first_step_at_loss(
    std::span<const ExperimentRecord> records, double target_loss) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].loss <= target_loss) return i;
  }
  return std::nullopt;
}

std::optional<double> compute_tta_loss(
    std::span<const ExperimentRecord> records, double target_loss) {
  const auto i = first_step_at_loss(records, target_loss);
  if (!i) return std::nullopt;
  return records[*i].sim_time;
}

std::vector<ThroughputPoint> compute_throughput(
    std::span<const ExperimentRecord> records, std::size_t window) {
  if (window == 0) throw ConfigError("compute_throughput: window must be > 0");
  std::vector<ThroughputPoint> out;
  if (records.size() < window) return out;
  out.reserve(records.size() - window + 1);
  // Re-summing each window keeps every point independent of earlier
  // rounding, which the incremental form would not.
  for (std::size_t end = window; end <= records.size(); ++end) {
    double sum = 0.0;
    for (std::size_t i = end - window; i < end; ++i) {
      sum += records[i].samples_per_sec;
    }
    out.push_back({records[end - 1].sim_time,
                   sum / static_cast<double>(window)});
  }
  return out;
}

double mean_throughput(std::span<const ExperimentRecord> records,
                       double samples_per_step) {
  if (records.empty() || !(records.back().sim_time > 0.0)) return 0.0;
  return samples_per_step * static_cast<double>(records.size()) /
         records.back().sim_time;
}

std::optional<double> convergence_time(
    std::span<const ExperimentRecord> records, double target_accuracy,
    double band, std::size_t evals) {
  if (evals == 0) evals = 1;
  std::size_t run = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    run = records[i].accuracy >= target_accuracy - band ? run + 1 : 0;
    if (run == evals) return records[i + 1 - evals].sim_time;
  }
  return std::nullopt;
}

BestPoint best_accuracy(std::span<const ExperimentRecord> records) {
  BestPoint best;
  bool first = true;
  for (const auto& r : records) {
    if (first || r.accuracy > best.accuracy) {
      best = {r.accuracy, r.sim_time};
      first = false;
    }
  }
  return best;
}

std::optional<double> accuracy_at(std::span<const ExperimentRecord> records,
                                  double t) {
  std::optional<double> acc;
  for (const auto& r : records) {
    if (r.sim_time > t) break;
    acc = r.accuracy;
  }
  return acc;
}

}  // namespace netsense
