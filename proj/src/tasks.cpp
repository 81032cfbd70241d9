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

#include "netsense/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netsense/error.hpp"

namespace netsense {

namespace {

constexpr std::uint64_t kEvalStream = 0x6576616cULL;
constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kDataStream = 0x64617461ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t batch_stream(std::uint64_t seed, int worker,
                           std::uint64_t batch_seed) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(worker) + 1),
                  batch_seed);
}

// Writes softmax(logits) in place; returns log-sum-exp.
double softmax_inplace(std::span<double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : logits) v /= z;
  return m + std::log(z);
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(
      std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

void require_dim(std::span<const double> params, std::size_t dim,
                 const char* who) {
  if (params.size() != dim) {
    throw ConfigError(std::string(who) + ": parameter dimension mismatch");
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

const char* to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kQuadratic:
      return "quadratic";
    case TaskKind::kSoftmax:
      return "softmax";
    case TaskKind::kMlp:
      return "mlp";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& s) {
  if (s == "quadratic") return TaskKind::kQuadratic;
  if (s == "softmax") return TaskKind::kSoftmax;
  if (s == "mlp") return TaskKind::kMlp;
  throw ConfigError("task.kind: unknown task '" + s + "'");
}

void TaskConfig::validate() const {
  if (kind == TaskKind::kQuadratic) {
    if (dimension < 1) throw ConfigError("task.dimension must be >= 1");
    if (!(signal_fraction >= 0.0 && signal_fraction <= 1.0)) {
      throw ConfigError("task.signal_fraction must be in [0, 1]");
    }
    if (!(curvature_min > 0.0 && curvature_min <= 1.0)) {
      throw ConfigError("task.curvature_min must be in (0, 1]");
    }
    if (!(worker_spread >= 0.0) || !(batch_noise >= 0.0) ||
        !(tail_scale >= 0.0) || !(tail_error >= 0.0)) {
      throw ConfigError("task: spreads and noise levels must be >= 0");
    }
  } else {
    if (features < 1 || classes < 2) {
      throw ConfigError("task: need features >= 1 and classes >= 2");
    }
    if (kind == TaskKind::kMlp && hidden < 1) {
      throw ConfigError("task.hidden must be >= 1");
    }
    if (eval_samples < 1) throw ConfigError("task.eval_samples must be >= 1");
  }
}

// ---------------------------------------------------------------------------
// QuadraticTask

QuadraticTask::QuadraticTask(std::vector<double> a, std::vector<double> b,
                             std::vector<std::vector<double>> worker_offsets,
                             std::vector<double> initial, double batch_noise,
                             std::uint64_t seed)
    : a_(std::move(a)),
      b_(std::move(b)),
      offsets_(std::move(worker_offsets)),
      init_(std::move(initial)),
      batch_noise_(batch_noise),
      seed_(seed) {
  if (b_.size() != a_.size() || init_.size() != a_.size()) {
    throw ConfigError("QuadraticTask: inconsistent dimensions");
  }
  for (const auto& o : offsets_) {
    if (o.size() != a_.size()) {
      throw ConfigError("QuadraticTask: worker offset dimension mismatch");
    }
  }
  initial_loss_ = loss(init_);
}

QuadraticTask QuadraticTask::generate(const TaskConfig& cfg, int workers) {
  cfg.validate();
  const std::size_t dim = cfg.dimension;
  std::mt19937_64 rng(mix_seed(cfg.seed, kDataStream));
  std::uniform_real_distribution<double> curv(cfg.curvature_min, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  std::vector<double> a(dim);
  for (double& v : a) v = std::sqrt(curv(rng));

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto signal_count = static_cast<std::size_t>(
      std::llround(cfg.signal_fraction * static_cast<double>(dim)));
  std::vector<bool> is_signal(dim, false);
  for (std::size_t i = 0; i < signal_count; ++i) is_signal[order[i]] = true;

  std::vector<double> optimum(dim);
  std::vector<double> init(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (is_signal[i]) {
      const double sign = coin(rng) ? 1.0 : -1.0;
      optimum[i] = sign * cfg.signal_target;
      init[i] = sign * cfg.signal_start;
    } else {
      optimum[i] = cfg.tail_scale * normal(rng);
      init[i] = optimum[i] + cfg.tail_error * normal(rng);
    }
  }

  std::vector<double> b(dim);
  for (std::size_t i = 0; i < dim; ++i) b[i] = a[i] * optimum[i];

  std::vector<std::vector<double>> offsets(
      static_cast<std::size_t>(std::max(workers, 1)),
      std::vector<double>(dim, 0.0));
  if (cfg.worker_spread > 0.0 && offsets.size() > 1) {
    for (auto& o : offsets) {
      for (double& v : o) v = cfg.worker_spread * normal(rng);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      double mean = 0.0;
      for (const auto& o : offsets) mean += o[i];
      mean /= static_cast<double>(offsets.size());
      for (auto& o : offsets) o[i] -= mean;
    }
  }
  return QuadraticTask(std::move(a), std::move(b), std::move(offsets),
                       std::move(init), cfg.batch_noise, cfg.seed);
}

GradientVector QuadraticTask::local_gradient(std::span<const double> params,
                                             int worker,
                                             std::uint64_t batch_seed,
                                             std::size_t batch) const {
  require_dim(params, a_.size(), "QuadraticTask::local_gradient");
  if (worker < 0 || static_cast<std::size_t>(worker) >= offsets_.size()) {
    throw ConfigError("QuadraticTask: worker id out of range");
  }
  const auto& off = offsets_[static_cast<std::size_t>(worker)];
  std::vector<double> g(a_.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = a_[i] * (a_[i] * params[i] - (b_[i] + off[i]));
  }
  if (batch_noise_ > 0.0) {
    std::mt19937_64 rng(batch_stream(seed_, worker, batch_seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma =
        batch_noise_ / std::sqrt(static_cast<double>(std::max<std::size_t>(
                           batch, 1)));
    for (double& v : g) v += sigma * normal(rng);
  }
  return GradientVector(std::move(g));
}

double QuadraticTask::loss(std::span<const double> params) const {
  require_dim(params, a_.size(), "QuadraticTask::loss");
  double f = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) {
    const double r = a_[i] * params[i] - b_[i];
    f += r * r;
  }
  return 0.5 * f;
}

double QuadraticTask::accuracy(std::span<const double> params) const {
  if (initial_loss_ <= 0.0) return 100.0;
  const double progress = 1.0 - loss(params) / initial_loss_;
  return 100.0 * std::clamp(progress, 0.0, 1.0);
}

GradientVector QuadraticTask::full_gradient(
    std::span<const double> params) const {
  require_dim(params, a_.size(), "QuadraticTask::full_gradient");
  std::vector<double> g(a_.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = a_[i] * (a_[i] * params[i] - b_[i]);
  }
  return GradientVector(std::move(g));
}

std::vector<double> QuadraticTask::optimum() const {
  std::vector<double> w(a_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = b_[i] / a_[i];
  return w;
}

double QuadraticTask::max_curvature() const {
  double m = 0.0;
  for (const double v : a_) m = std::max(m, v * v);
  return m;
}

// ---------------------------------------------------------------------------
// ClusterData

ClusterData::ClusterData(std::size_t features, std::size_t classes,
                         double separation, std::uint64_t seed)
    : features_(features), classes_(classes), means_(features * classes) {
  std::mt19937_64 rng(mix_seed(seed, kDataStream));
  std::normal_distribution<double> normal(
      0.0, separation / std::sqrt(static_cast<double>(features)));
  for (double& v : means_) v = normal(rng);
}

LabeledBatch ClusterData::sample(std::uint64_t stream,
                                 std::size_t rows) const {
  std::mt19937_64 rng(stream);
  std::uniform_int_distribution<int> label(0, static_cast<int>(classes_) - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledBatch b;
  b.rows = rows;
  b.x.resize(rows * features_);
  b.y.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const int y = label(rng);
    b.y[r] = y;
    const double* mu = &means_[static_cast<std::size_t>(y) * features_];
    double* row = &b.x[r * features_];
    for (std::size_t j = 0; j < features_; ++j) row[j] = mu[j] + normal(rng);
  }
  return b;
}

// ---------------------------------------------------------------------------
// SoftmaxTask
//
// Layout: W (classes x features) row-major, then bias (classes).

SoftmaxTask::SoftmaxTask(const TaskConfig& cfg)
    : cfg_(cfg),
      data_(cfg.features, cfg.classes, cfg.separation, cfg.seed),
      eval_(data_.sample(mix_seed(cfg.seed, kEvalStream), cfg.eval_samples)) {
  cfg_.validate();
}

std::size_t SoftmaxTask::dimension() const {
  return cfg_.classes * cfg_.features + cfg_.classes;
}

std::vector<double> SoftmaxTask::initial_parameters() const {
  std::mt19937_64 rng(mix_seed(cfg_.seed, kInitStream));
  std::normal_distribution<double> normal(0.0, cfg_.init_scale);
  std::vector<double> w(dimension());
  for (std::size_t i = 0; i < cfg_.classes * cfg_.features; ++i) {
    w[i] = normal(rng);
  }
  return w;
}

double SoftmaxTask::batch_loss(std::span<const double> params,
                               const LabeledBatch& b) const {
  require_dim(params, dimension(), "SoftmaxTask::batch_loss");
  const std::size_t f = cfg_.features;
  const std::size_t k = cfg_.classes;
  const double* bias = params.data() + k * f;
  std::vector<double> logits(k);
  double total = 0.0;
  for (std::size_t r = 0; r < b.rows; ++r) {
    const double* x = &b.x[r * f];
    for (std::size_t c = 0; c < k; ++c) {
      const double* w = params.data() + c * f;
      logits[c] = std::inner_product(x, x + f, w, bias[c]);
    }
    const double lse = softmax_inplace(logits);
    // softmax_inplace overwrote logits; recompute the true-class logit.
    const double* w = params.data() + static_cast<std::size_t>(b.y[r]) * f;
    total += lse - std::inner_product(x, x + f, w, bias[b.y[r]]);
  }
  return total / static_cast<double>(b.rows);
}

GradientVector SoftmaxTask::batch_gradient(std::span<const double> params,
                                           const LabeledBatch& b) const {
  require_dim(params, dimension(), "SoftmaxTask::batch_gradient");
  const std::size_t f = cfg_.features;
  const std::size_t k = cfg_.classes;
  const double* bias = params.data() + k * f;
  std::vector<double> g(dimension(), 0.0);
  std::vector<double> p(k);
  const double inv_rows = 1.0 / static_cast<double>(b.rows);
  for (std::size_t r = 0; r < b.rows; ++r) {
    const double* x = &b.x[r * f];
    for (std::size_t c = 0; c < k; ++c) {
      const double* w = params.data() + c * f;
      p[c] = std::inner_product(x, x + f, w, bias[c]);
    }
    softmax_inplace(p);
    p[static_cast<std::size_t>(b.y[r])] -= 1.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double coef = p[c] * inv_rows;
      double* gw = &g[c * f];
      for (std::size_t j = 0; j < f; ++j) gw[j] += coef * x[j];
      g[k * f + c] += coef;
    }
  }
  return GradientVector(std::move(g));
}

GradientVector SoftmaxTask::local_gradient(std::span<const double> params,
                                           int worker,
                                           std::uint64_t batch_seed,
                                           std::size_t batch) const {
  const LabeledBatch b =
      data_.sample(batch_stream(cfg_.seed, worker, batch_seed), batch);
  return batch_gradient(params, b);
}

double SoftmaxTask::loss(std::span<const double> params) const {
  return batch_loss(params, eval_);
}

double SoftmaxTask::accuracy(std::span<const double> params) const {
  require_dim(params, dimension(), "SoftmaxTask::accuracy");
  const std::size_t f = cfg_.features;
  const std::size_t k = cfg_.classes;
  const double* bias = params.data() + k * f;
  std::vector<double> logits(k);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < eval_.rows; ++r) {
    const double* x = &eval_.x[r * f];
    for (std::size_t c = 0; c < k; ++c) {
      logits[c] = std::inner_product(x, x + f, params.data() + c * f, bias[c]);
    }
    if (argmax(logits) == static_cast<std::size_t>(eval_.y[r])) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(eval_.rows);
}

// ---------------------------------------------------------------------------
// MlpTask
//
// Layout: W1 (hidden x features), b1 (hidden), W2 (classes x hidden),
// b2 (classes).

namespace {

struct MlpView {
  const double* w1;
  const double* b1;
  const double* w2;
  const double* b2;
};

MlpView mlp_view(std::span<const double> p, std::size_t f, std::size_t h,
                 std::size_t k) {
  return {p.data(), p.data() + h * f, p.data() + h * f + h,
          p.data() + h * f + h + k * h};
}

}  // namespace

MlpTask::MlpTask(const TaskConfig& cfg)
    : cfg_(cfg),
      data_(cfg.features, cfg.classes, cfg.separation, cfg.seed),
      eval_(data_.sample(mix_seed(cfg.seed, kEvalStream), cfg.eval_samples)) {
  cfg_.validate();
}

std::size_t MlpTask::dimension() const {
  const std::size_t f = cfg_.features, h = cfg_.hidden, k = cfg_.classes;
  return h * f + h + k * h + k;
}

std::vector<double> MlpTask::initial_parameters() const {
  const std::size_t f = cfg_.features, h = cfg_.hidden, k = cfg_.classes;
  std::mt19937_64 rng(mix_seed(cfg_.seed, kInitStream));
  std::normal_distribution<double> w1(0.0,
                                      1.0 / std::sqrt(static_cast<double>(f)));
  std::normal_distribution<double> w2(0.0,
                                      1.0 / std::sqrt(static_cast<double>(h)));
  std::vector<double> p(dimension(), 0.0);
  for (std::size_t i = 0; i < h * f; ++i) p[i] = w1(rng);
  for (std::size_t i = 0; i < k * h; ++i) p[h * f + h + i] = w2(rng);
  return p;
}

double MlpTask::batch_loss(std::span<const double> params,
                           const LabeledBatch& b) const {
  require_dim(params, dimension(), "MlpTask::batch_loss");
  const std::size_t f = cfg_.features, h = cfg_.hidden, k = cfg_.classes;
  const MlpView v = mlp_view(params, f, h, k);
  std::vector<double> hid(h), out(k);
  double total = 0.0;
  for (std::size_t r = 0; r < b.rows; ++r) {
    const double* x = &b.x[r * f];
    for (std::size_t u = 0; u < h; ++u) {
      hid[u] = std::tanh(std::inner_product(x, x + f, v.w1 + u * f, v.b1[u]));
    }
    for (std::size_t c = 0; c < k; ++c) {
      out[c] = std::inner_product(hid.begin(), hid.end(), v.w2 + c * h,
                                  v.b2[c]);
    }
    const double target = out[static_cast<std::size_t>(b.y[r])];
    total += softmax_inplace(out) - target;
  }
  return total / static_cast<double>(b.rows);
}

GradientVector MlpTask::batch_gradient(std::span<const double> params,
                                       const LabeledBatch& b) const {
  require_dim(params, dimension(), "MlpTask::batch_gradient");
  const std::size_t f = cfg_.features, h = cfg_.hidden, k = cfg_.classes;
  const MlpView v = mlp_view(params, f, h, k);
  std::vector<double> g(dimension(), 0.0);
  double* gw1 = g.data();
  double* gb1 = g.data() + h * f;
  double* gw2 = g.data() + h * f + h;
  double* gb2 = g.data() + h * f + h + k * h;
  std::vector<double> hid(h), out(k), dhid(h);
  const double inv_rows = 1.0 / static_cast<double>(b.rows);
  for (std::size_t r = 0; r < b.rows; ++r) {
    const double* x = &b.x[r * f];
    for (std::size_t u = 0; u < h; ++u) {
      hid[u] = std::tanh(std::inner_product(x, x + f, v.w1 + u * f, v.b1[u]));
    }
    for (std::size_t c = 0; c < k; ++c) {
      out[c] = std::inner_product(hid.begin(), hid.end(), v.w2 + c * h,
                                  v.b2[c]);
    }
    softmax_inplace(out);
    out[static_cast<std::size_t>(b.y[r])] -= 1.0;
    std::fill(dhid.begin(), dhid.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double d = out[c] * inv_rows;
      gb2[c] += d;
      for (std::size_t u = 0; u < h; ++u) {
        gw2[c * h + u] += d * hid[u];
        dhid[u] += d * v.w2[c * h + u];
      }
    }
    for (std::size_t u = 0; u < h; ++u) {
      const double d = dhid[u] * (1.0 - hid[u] * hid[u]);
      gb1[u] += d;
      double* row = gw1 + u * f;
      for (std::size_t j = 0; j < f; ++j) row[j] += d * x[j];
    }
  }
  return GradientVector(std::move(g));
}

GradientVector MlpTask::local_gradient(std::span<const double> params,
                                       int worker, std::uint64_t batch_seed,
                                       std::size_t batch) const {
  const LabeledBatch b =
      data_.sample(batch_stream(cfg_.seed, worker, batch_seed), batch);
  return batch_gradient(params, b);
}

double MlpTask::loss(std::span<const double> params) const {
  return batch_loss(params, eval_);
}

double MlpTask::accuracy(std::span<const double> params) const {
  require_dim(params, dimension(), "MlpTask::accuracy");
  const std::size_t f = cfg_.features, h = cfg_.hidden, k = cfg_.classes;
  const MlpView v = mlp_view(params, f, h, k);
  std::vector<double> hid(h), out(k);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < eval_.rows; ++r) {
    const double* x = &eval_.x[r * f];
    for (std::size_t u = 0; u < h; ++u) {
      hid[u] = std::tanh(std::inner_product(x, x + f, v.w1 + u * f, v.b1[u]));
    }
    for (std::size_t c = 0; c < k; ++c) {
      out[c] = std::inner_product(hid.begin(), hid.end(), v.w2 + c * h,
                                  v.b2[c]);
    }
    if (argmax(out) == static_cast<std::size_t>(eval_.y[r])) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(eval_.rows);
}

std::unique_ptr<ToyModel> make_model(const TaskConfig& cfg, int workers) {
  switch (cfg.kind) {
    case TaskKind::kQuadratic:
      return std::make_unique<QuadraticTask>(
          QuadraticTask::generate(cfg, workers));
    case TaskKind::kSoftmax:
      return std::make_unique<SoftmaxTask>(cfg);
    case TaskKind::kMlp:
      return std::make_unique<MlpTask>(cfg);
  }
  throw ConfigError("make_model: unknown task kind");
}

}  // namespace netsense
