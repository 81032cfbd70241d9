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

// Flat gradient containers and the error-feedback arithmetic shared by the
// compression pipeline. Values are kept in double; the nominal wire precision
// of a payload is tracked separately (see compressor.hpp).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace netsense {

class GradientVector {
 public:
  GradientVector() = default;
  explicit GradientVector(std::size_t dim, std::int64_t step_index = 0)
      : values_(dim, 0.0), step_index_(step_index) {}
  explicit GradientVector(std::vector<double> values,
                          std::int64_t step_index = 0)
      : values_(std::move(values)), step_index_(step_index) {}

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::int64_t step_index() const { return step_index_; }
  void set_step_index(std::int64_t step) { step_index_ = step; }

  bool operator==(const GradientVector&) const = default;

 private:
  std::vector<double> values_;
  std::int64_t step_index_ = 0;
};

// Per-worker untransmitted gradient mass. Never synchronized across workers.
class ResidualBuffer {
 public:
  ResidualBuffer() = default;
  explicit ResidualBuffer(std::size_t dim) : values_(dim, 0.0) {}
  explicit ResidualBuffer(std::vector<double> values)
      : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const ResidualBuffer&) const = default;

 private:
  std::vector<double> values_;
};

// Parameters whose gradients are withheld from one step's transmission.
// The parameters themselves are untouched.
struct PruneMask {
  std::vector<std::size_t> excluded;  // ascending
  double pruning_rate = 0.0;
};

// Throws GradientError naming the first non-finite entry.
void check_finite(std::span<const double> values, const char* what);

// Euclidean norm, computed with LAPACK-style scaling so it neither overflows
// nor underflows for representable inputs.
double l2_norm(const GradientVector& g);
double l2_norm(std::span<const double> values);

// g + r. Result keeps g's step index.
GradientVector accumulate(const GradientVector& g, const ResidualBuffer& r);

// accumulated - transmitted_dense.
ResidualBuffer update_residual(const GradientVector& accumulated,
                               const GradientVector& transmitted_dense);

}  // namespace netsense
