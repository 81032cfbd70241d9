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

#include "netsense/grad.hpp"

#include <cmath>
#include <string>

#include "netsense/error.hpp"

namespace netsense {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ConfigError(std::string(op) + ": dimension mismatch (" +
                      std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

void check_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw GradientError(std::string(what) + ": non-finite value at index " +
                          std::to_string(i));
    }
  }
}

double l2_norm(std::span<const double> values) {
  double scale = 0.0;
  double ssq = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) {
      throw GradientError("l2_norm: corrupted gradient, non-finite value at " +
                          std::to_string(i));
    }
    if (v == 0.0) continue;
    const double a = std::fabs(v);
    if (scale < a) {
      const double q = scale / a;
      ssq = 1.0 + ssq * q * q;
      scale = a;
    } else {
      const double q = a / scale;
      ssq += q * q;
    }
  }
  return scale * std::sqrt(ssq);
}

double l2_norm(const GradientVector& g) { return l2_norm(g.values()); }

GradientVector accumulate(const GradientVector& g, const ResidualBuffer& r) {
  require_same_dim(g.size(), r.size(), "accumulate");
  std::vector<double> out(g.size());
  const auto gv = g.values();
  const auto rv = r.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = gv[i] + rv[i];
  return GradientVector(std::move(out), g.step_index());
}

ResidualBuffer update_residual(const GradientVector& accumulated,
                               const GradientVector& transmitted_dense) {
  require_same_dim(accumulated.size(), transmitted_dense.size(),
                   "update_residual");
  std::vector<double> out(accumulated.size());
  const auto a = accumulated.values();
  const auto t = transmitted_dense.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - t[i];
  return ResidualBuffer(std::move(out));
}

}  // namespace netsense
