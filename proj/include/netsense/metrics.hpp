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
#include <optional>
#include <span>
#include <vector>

#include "netsense/record.hpp"

namespace netsense {

// First sim_time with accuracy >= target; nullopt when never reached.
std::optional<double> compute_tta(std::span<const ExperimentRecord> records,
                                  double target_accuracy);

// First sim_time with loss <= target.
std::optional<double> compute_tta_loss(
    std::span<const ExperimentRecord> records, double target_loss);

// Index of the first row with loss <= target.
std::optional<std::size_t> first_step_at_loss(
    std::span<const ExperimentRecord> records, double target_loss);

struct ThroughputPoint {
  double sim_time;
  double samples_per_sec;
};

// Sliding mean of per-step samples_per_sec over `window` rows. The series
// starts at the first full window.
std::vector<ThroughputPoint> compute_throughput(
    std::span<const ExperimentRecord> records, std::size_t window);

// Whole-run throughput: samples_per_step * rows / final sim_time.
double mean_throughput(std::span<const ExperimentRecord> records,
                       double samples_per_step);

// First sim_time from which accuracy stays >= target - band for `evals`
// consecutive rows.
std::optional<double> convergence_time(
    std::span<const ExperimentRecord> records, double target_accuracy,
    double band = 0.5, std::size_t evals = 20);

// Best accuracy and the first sim_time it was attained.
struct BestPoint {
  double accuracy = 0.0;
  double sim_time = 0.0;
};
BestPoint best_accuracy(std::span<const ExperimentRecord> records);

// Accuracy of the last row with sim_time <= t; nullopt if none.
std::optional<double> accuracy_at(std::span<const ExperimentRecord> records,
                                  double t);

}  // namespace netsense
