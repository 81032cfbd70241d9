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

#include "netsense/compressor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "netsense/error.hpp"

namespace netsense {

namespace {

constexpr double kMaxHalf = 65504.0;

void require_ratio(double ratio, const char* op) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ConfigError(std::string(op) + ": ratio must be in (0, 1], got " +
                      std::to_string(ratio));
  }
}

// Larger magnitude first; lower index breaks ties.
struct Keyed {
  double mag;
  std::uint32_t index;
};

// Indices of the `count` entries ranked first by `before`, ascending.
template <typename Before>
std::vector<std::uint32_t> select_indices(std::span<const double> v,
                                          std::size_t count, Before before) {
  std::vector<std::uint32_t> out;
  if (count == 0) return out;
  if (count >= v.size()) {
    out.resize(v.size());
    std::iota(out.begin(), out.end(), 0u);
    return out;
  }
  std::vector<Keyed> keyed(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    keyed[i] = {std::fabs(v[i]), static_cast<std::uint32_t>(i)};
  }
  std::nth_element(keyed.begin(), keyed.begin() + (count - 1), keyed.end(),
                   before);
  out.reserve(count);
  if (count * 16 < v.size()) {
    for (std::size_t j = 0; j < count; ++j) out.push_back(keyed[j].index);
    std::sort(out.begin(), out.end());
  } else {
    std::vector<char> marked(v.size(), 0);
    for (std::size_t j = 0; j < count; ++j) marked[keyed[j].index] = 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (marked[i]) out.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

// Larger magnitude first; ties go to the lower index.
struct LargerFirst {
  bool operator()(const Keyed& a, const Keyed& b) const {
    if (a.mag != b.mag) return a.mag > b.mag;
    return a.index < b.index;
  }
};

struct SmallerFirst {
  bool operator()(const Keyed& a, const Keyed& b) const {
    if (a.mag != b.mag) return a.mag < b.mag;
    return a.index < b.index;
  }
};

}  // namespace

const char* to_string(Precision p) {
  return p == Precision::kHalf16 ? "half16" : "full32";
}

void CompressionConfig::validate() const {
  if (!(tr_q >= 0.0 && tr_q <= 1.0)) {
    throw ConfigError("compression.tr_q must be in [0, 1]");
  }
  if (!(tr_d >= 0.0) || !std::isfinite(tr_d)) {
    throw ConfigError("compression.tr_d must be finite and >= 0");
  }
  if (index_width_bytes == 0) {
    throw ConfigError("compression.index_width_bytes must be > 0");
  }
}

std::uint32_t value_width_bytes(Precision p) {
  return p == Precision::kHalf16 ? 2u : 4u;
}

std::uint64_t payload_wire_bytes(std::size_t k, Precision precision,
                                 const CompressionConfig& cfg) {
  return static_cast<std::uint64_t>(cfg.header_bytes) +
         static_cast<std::uint64_t>(k) * cfg.index_width_bytes +
         static_cast<std::uint64_t>(k) * value_width_bytes(precision);
}

std::size_t kept_count(double ratio, std::size_t dim) {
  if (dim == 0) return 0;
  const auto k = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(dim)));
  return std::clamp<std::size_t>(k, 1, dim);
}

std::uint64_t predicted_wire_bytes(std::size_t dim, double ratio,
                                   const CompressionConfig& cfg) {
  require_ratio(ratio, "predicted_wire_bytes");
  double effective = ratio;
  Precision precision = Precision::kFull32;
  if (ratio < cfg.tr_q) {
    effective = std::min(1.0, 2.0 * ratio);
    precision = Precision::kHalf16;
  }
  return payload_wire_bytes(kept_count(effective, dim), precision, cfg);
}

double round_to_half(double v) {
  if (v >= kMaxHalf) return kMaxHalf;
  if (v <= -kMaxHalf) return -kMaxHalf;
  const Eigen::half h(static_cast<float>(v));
  return static_cast<double>(static_cast<float>(h));
}

QuantizeResult adaptive_quantize(const GradientVector& g, double ratio,
                                 const CompressionConfig& cfg) {
  require_ratio(ratio, "adaptive_quantize");
  QuantizeResult out;
  out.ratio = ratio;
  if (ratio < cfg.tr_q && l2_norm(g) > cfg.tr_d) {
    std::vector<double> q(g.size());
    const auto src = g.values();
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = round_to_half(src[i]);
    out.values = GradientVector(std::move(q), g.step_index());
    out.precision = Precision::kHalf16;
    out.ratio = std::min(1.0, 2.0 * ratio);
  } else {
    out.values = g;
  }
  return out;
}

PruneMask prune_mask(std::span<const double> weights, double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ConfigError("prune_mask: ratio must be in [0, 1]");
  }
  PruneMask mask;
  mask.pruning_rate = 0.5 * (1.0 - ratio);
  const auto count = static_cast<std::size_t>(std::floor(
      mask.pruning_rate * static_cast<double>(weights.size()) + 1e-9));
  if (count == 0) return mask;

  if (weights.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("prune_mask: dimension exceeds 32-bit index width");
  }
  const auto order = select_indices(weights, count, SmallerFirst{});
  mask.excluded.assign(order.begin(), order.end());
  return mask;
}

GradientVector apply_mask(const GradientVector& g, const PruneMask& m) {
  GradientVector out = g;
  for (const std::size_t i : m.excluded) {
    if (i >= g.size()) {
      throw ConfigError("apply_mask: index " + std::to_string(i) +
                        " out of range for dimension " +
                        std::to_string(g.size()));
    }
    out[i] = 0.0;
  }
  return out;
}

CompressedPayload topk_sparsify(const GradientVector& g, double ratio,
                                Precision precision) {
  require_ratio(ratio, "topk_sparsify");
  if (g.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("topk_sparsify: dimension exceeds 32-bit index width");
  }
  const std::size_t dim = g.size();
  const std::size_t k = kept_count(ratio, dim);

  std::vector<std::uint32_t> order =
      select_indices(g.values(), k, LargerFirst{});

  CompressedPayload p;
  p.precision = precision;
  p.source_step = g.step_index();
  p.values.reserve(order.size());
  for (const std::uint32_t i : order) p.values.push_back(g[i]);
  p.indices = std::move(order);
  return p;
}

GradientVector densify(const CompressedPayload& p, std::size_t dim) {
  if (p.indices.size() != p.values.size()) {
    throw CorruptPayloadError("densify: index/value count mismatch");
  }
  GradientVector out(dim, p.source_step);
  for (std::size_t j = 0; j < p.indices.size(); ++j) {
    const std::uint32_t i = p.indices[j];
    if (i >= dim) {
      throw CorruptPayloadError("densify: index " + std::to_string(i) +
                                " >= dimension " + std::to_string(dim));
    }
    out[i] = p.values[j];
  }
  return out;
}

CompressResult compress(const GradientVector& g, const ResidualBuffer& r,
                        std::span<const double> weights, double ratio,
                        const CompressionConfig& cfg) {
  if (weights.size() != g.size()) {
    throw ConfigError("compress: weights and gradient dimensions differ");
  }
  const GradientVector accumulated = accumulate(g, r);
  QuantizeResult q = adaptive_quantize(accumulated, ratio, cfg);

  CompressResult out;
  out.effective_ratio = q.ratio;
  GradientVector candidates = std::move(q.values);
  if (cfg.pruning) {
    const PruneMask mask = prune_mask(weights, q.ratio);
    out.pruning_rate = mask.pruning_rate;
    candidates = apply_mask(candidates, mask);
  }
  out.payload = topk_sparsify(candidates, q.ratio, q.precision);
  out.residual =
      update_residual(accumulated, densify(out.payload, accumulated.size()));
  return out;
}

}  // namespace netsense
