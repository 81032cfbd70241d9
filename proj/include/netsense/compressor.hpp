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

// Network-adaptive gradient compression: an adaptive half-precision gate,
// weight-magnitude pruning of the transmitted set, and TopK sparsification
// with error feedback.
//
// Pipeline order per worker and step:
//
//   accumulated = gradient + residual
//   (values, ratio') = adaptive_quantize(accumulated, ratio)
//   mask = prune_mask(weights, ratio'); values[mask] = 0
//   payload = topk_sparsify(values, ratio')
//   residual' = accumulated - densify(payload)

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netsense/grad.hpp"

namespace netsense {

enum class Precision : std::uint8_t { kFull32 = 0, kHalf16 = 1 };

const char* to_string(Precision p);

struct CompressionConfig {
  double tr_q = 0.05;  // quantization check threshold on the ratio
  double tr_d = 1e-6;  // gradient density threshold on the L2 norm
  bool pruning = true;
  std::uint32_t index_width_bytes = 4;
  std::uint32_t header_bytes = 16;

  // Throws ConfigError.
  void validate() const;
};

std::uint32_t value_width_bytes(Precision p);

// header + k * index_width + k * value_width(precision).
std::uint64_t payload_wire_bytes(std::size_t k, Precision precision,
                                 const CompressionConfig& cfg = {});

// max(1, round(ratio * dim)), capped at dim.
std::size_t kept_count(double ratio, std::size_t dim);

// Wire size the pipeline produces for a given controller ratio, assuming the
// gradient passes the density gate. Exact for every input whose L2 norm
// exceeds tr_d.
std::uint64_t predicted_wire_bytes(std::size_t dim, double ratio,
                                   const CompressionConfig& cfg = {});

struct CompressedPayload {
  std::vector<std::uint32_t> indices;  // strictly increasing
  std::vector<double> values;          // half16 payloads hold binary16 values
  Precision precision = Precision::kFull32;
  std::int64_t source_step = 0;

  std::size_t k() const { return indices.size(); }
  std::uint64_t wire_size_bytes(const CompressionConfig& cfg = {}) const {
    return payload_wire_bytes(indices.size(), precision, cfg);
  }
};

// Round to the nearest binary16 value (ties to even), widened back to
// double. Magnitudes beyond the largest finite half saturate.
double round_to_half(double v);

struct QuantizeResult {
  GradientVector values;
  Precision precision = Precision::kFull32;
  double ratio = 1.0;
};

// Gate evaluated once per step on the incoming ratio: when ratio < tr_q and
// ||g|| > tr_d, values drop to half precision and the ratio doubles
// (capped at 1). Otherwise g passes through untouched.
QuantizeResult adaptive_quantize(const GradientVector& g, double ratio,
                                 const CompressionConfig& cfg);

// Excludes the floor(0.5 * (1 - ratio) * D) smallest-|weight| parameters.
// Ties go to the lower index.
PruneMask prune_mask(std::span<const double> weights, double ratio);

GradientVector apply_mask(const GradientVector& g, const PruneMask& m);

// Keeps the kept_count(ratio, D) largest-|value| entries (lower index wins
// ties), returned in ascending index order. Zeros are kept when fewer
// non-zero entries exist, so the payload size depends only on (ratio, D).
CompressedPayload topk_sparsify(const GradientVector& g, double ratio,
                                Precision precision = Precision::kFull32);

// Scatter into a zero vector of length dim. Throws CorruptPayloadError.
GradientVector densify(const CompressedPayload& p, std::size_t dim);

struct CompressResult {
  CompressedPayload payload;
  ResidualBuffer residual;
  double effective_ratio = 1.0;
  double pruning_rate = 0.0;
};

CompressResult compress(const GradientVector& g, const ResidualBuffer& r,
                        std::span<const double> weights, double ratio,
                        const CompressionConfig& cfg);

}  // namespace netsense
