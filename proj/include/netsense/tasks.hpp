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

// Desk-scale training tasks standing in for full DNN workloads. Each task
// owns its data and exposes per-worker minibatch gradients that are
// deterministic in (worker, batch_seed).

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "netsense/grad.hpp"

namespace netsense {

enum class TaskKind { kQuadratic, kSoftmax, kMlp };

const char* to_string(TaskKind k);
TaskKind parse_task_kind(const std::string& s);

struct TaskConfig {
  TaskKind kind = TaskKind::kQuadratic;
  std::uint64_t seed = 1;

  // Quadratic: separable least squares f(w) = 1/2 ||A w - b||^2 with
  // A = diag(a). A `signal_fraction` of coordinates starts far from the
  // optimum (|w*| = signal_target, |w0| = signal_start, same sign); the rest
  // start within tail_error of an optimum drawn from N(0, tail_scale^2).
  std::size_t dimension = 10000;
  double signal_fraction = 0.005;
  double signal_target = 4.0;
  double signal_start = 1.0;
  double tail_scale = 0.3;
  double tail_error = 0.02;
  double curvature_min = 0.5;  // a_i^2 ~ U[curvature_min, 1]
  double worker_spread = 0.1;  // per-worker target perturbation, zero-mean
  double batch_noise = 0.0;    // additive N(0, batch_noise^2) per coordinate

  // Softmax / MLP on Gaussian clusters.
  std::size_t features = 1000;
  std::size_t classes = 10;
  std::size_t hidden = 16;
  double separation = 3.0;
  std::size_t eval_samples = 256;
  double init_scale = 0.01;

  void validate() const;
};

class ToyModel {
 public:
  virtual ~ToyModel() = default;

  virtual TaskKind kind() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> initial_parameters() const = 0;
  virtual GradientVector local_gradient(std::span<const double> params,
                                        int worker, std::uint64_t batch_seed,
                                        std::size_t batch) const = 0;
  virtual double loss(std::span<const double> params) const = 0;
  // Percent in [0, 100]. Classification accuracy on the held-out set, or
  // for the quadratic the fraction of initial loss removed.
  virtual double accuracy(std::span<const double> params) const = 0;
};

class QuadraticTask final : public ToyModel {
 public:
  // a: diagonal of A; b: global targets; worker_offsets: one vector per
  // worker, each of dimension D, summing to zero across workers.
  QuadraticTask(std::vector<double> a, std::vector<double> b,
                std::vector<std::vector<double>> worker_offsets,
                std::vector<double> initial, double batch_noise,
                std::uint64_t seed);

  static QuadraticTask generate(const TaskConfig& cfg, int workers);

  TaskKind kind() const override { return TaskKind::kQuadratic; }
  std::size_t dimension() const override { return a_.size(); }
  std::vector<double> initial_parameters() const override { return init_; }
  GradientVector local_gradient(std::span<const double> params, int worker,
                                std::uint64_t batch_seed,
                                std::size_t batch) const override;
  double loss(std::span<const double> params) const override;
  double accuracy(std::span<const double> params) const override;

  // Full-objective gradient A^T (A w - b).
  GradientVector full_gradient(std::span<const double> params) const;
  std::vector<double> optimum() const;
  double max_curvature() const;
  std::span<const double> diag() const { return a_; }
  std::span<const double> targets() const { return b_; }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<std::vector<double>> offsets_;
  std::vector<double> init_;
  double batch_noise_;
  std::uint64_t seed_;
  double initial_loss_;
};

struct LabeledBatch {
  std::vector<double> x;  // row-major, rows x features
  std::vector<int> y;
  std::size_t rows = 0;
};

// Isotropic Gaussian clusters, one per class.
class ClusterData {
 public:
  ClusterData(std::size_t features, std::size_t classes, double separation,
              std::uint64_t seed);

  LabeledBatch sample(std::uint64_t stream, std::size_t rows) const;
  std::size_t features() const { return features_; }
  std::size_t classes() const { return classes_; }

 private:
  std::size_t features_;
  std::size_t classes_;
  std::vector<double> means_;  // classes x features
};

class SoftmaxTask final : public ToyModel {
 public:
  explicit SoftmaxTask(const TaskConfig& cfg);

  TaskKind kind() const override { return TaskKind::kSoftmax; }
  std::size_t dimension() const override;
  std::vector<double> initial_parameters() const override;
  GradientVector local_gradient(std::span<const double> params, int worker,
                                std::uint64_t batch_seed,
                                std::size_t batch) const override;
  double loss(std::span<const double> params) const override;
  double accuracy(std::span<const double> params) const override;

  // Mean cross-entropy over an explicit batch; used by gradient checks.
  double batch_loss(std::span<const double> params,
                    const LabeledBatch& b) const;
  GradientVector batch_gradient(std::span<const double> params,
                                const LabeledBatch& b) const;

 private:
  TaskConfig cfg_;
  ClusterData data_;
  LabeledBatch eval_;
};

// One tanh hidden layer followed by softmax.
class MlpTask final : public ToyModel {
 public:
  explicit MlpTask(const TaskConfig& cfg);

  TaskKind kind() const override { return TaskKind::kMlp; }
  std::size_t dimension() const override;
  std::vector<double> initial_parameters() const override;
  GradientVector local_gradient(std::span<const double> params, int worker,
                                std::uint64_t batch_seed,
                                std::size_t batch) const override;
  double loss(std::span<const double> params) const override;
  double accuracy(std::span<const double> params) const override;

  double batch_loss(std::span<const double> params,
                    const LabeledBatch& b) const;
  GradientVector batch_gradient(std::span<const double> params,
                                const LabeledBatch& b) const;
  const ClusterData& data() const { return data_; }

 private:
  TaskConfig cfg_;
  ClusterData data_;
  LabeledBatch eval_;
};

std::unique_ptr<ToyModel> make_model(const TaskConfig& cfg, int workers);

// SplitMix64 finalizer over a combined key; stable seed derivation for
// per-(worker, step) streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace netsense
