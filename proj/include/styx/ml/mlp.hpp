#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "styx/error.hpp"
#include "styx/ml/binary_io.hpp"
#include "styx/ml/matrix.hpp"
#include "styx/random.hpp"

namespace styx::ml {

struct MlpParams {
  std::size_t hidden = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 200;
  std::size_t batch_size = 32;
  bool operator==(const MlpParams&) const = default;
};

/// One hidden layer of rectified units with a softmax output, trained on
/// cross-entropy by mini-batch SGD with momentum.
///
/// All weights live in one flat vector laid out as
///   W1 (hidden x d), b1 (hidden), W2 (k x hidden), b2 (k)
/// so the optimizer and the gradient check can treat it as one vector.
class Mlp {
 public:
  struct Shape {
    std::size_t inputs = 0, hidden = 0, outputs = 0;
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return hidden * inputs; }
    std::size_t w2() const { return b1() + hidden; }
    std::size_t b2() const { return w2() + outputs * hidden; }
    std::size_t size() const { return b2() + outputs; }
    bool operator==(const Shape&) const = default;
  };

  Mlp() = default;
  explicit Mlp(MlpParams p) : params_(p) {}

  /// Mean cross-entropy over `rows` of (x, y); adds its gradient into `grad`
  /// (sized shape.size()) when non-null.
  static double loss_and_gradient(const Shape& shape, std::span<const double> theta, const Matrix& x,
                                  std::span<const int> y, std::span<const std::size_t> rows, std::span<double> grad) {
    const std::size_t d = shape.inputs, h = shape.hidden, k = shape.outputs;
    std::vector<double> a(h), z(k);
    double loss = 0;
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (std::size_t i : rows) {
      const auto xi = x.row(i);
      for (std::size_t u = 0; u < h; ++u) {
        const double pre = dot(theta.subspan(shape.w1() + u * d, d), xi) + theta[shape.b1() + u];
        a[u] = pre > 0 ? pre : 0.0;
      }
      for (std::size_t c = 0; c < k; ++c) z[c] = dot(theta.subspan(shape.w2() + c * h, h), a) + theta[shape.b2() + c];
      softmax(z);
      loss -= std::log(std::max(z[y[i]], 1e-300));
      if (grad.empty()) continue;
      for (std::size_t c = 0; c < k; ++c) {
        const double r = (z[c] - (static_cast<int>(c) == y[i] ? 1.0 : 0.0)) * inv;
        for (std::size_t u = 0; u < h; ++u) grad[shape.w2() + c * h + u] += r * a[u];
        grad[shape.b2() + c] += r;
      }
      for (std::size_t u = 0; u < h; ++u) {
        if (a[u] <= 0) continue;
        double back = 0;
        for (std::size_t c = 0; c < k; ++c)
          back += (z[c] - (static_cast<int>(c) == y[i] ? 1.0 : 0.0)) * theta[shape.w2() + c * h + u];
        back *= inv;
        for (std::size_t j = 0; j < d; ++j) grad[shape.w1() + u * d + j] += back * xi[j];
        grad[shape.b1() + u] += back;
      }
    }
    return loss * inv;
  }

  /// Symmetric uniform initialization, limit sqrt(6 / (fan_in + fan_out))
  /// per layer; biases start at zero.
  static std::vector<double> initial_weights(const Shape& shape, Rng& rng) {
    std::vector<double> theta(shape.size(), 0.0);
    const double l1 = std::sqrt(6.0 / static_cast<double>(shape.inputs + shape.hidden));
    const double l2 = std::sqrt(6.0 / static_cast<double>(shape.hidden + shape.outputs));
    for (std::size_t i = shape.w1(); i < shape.b1(); ++i) theta[i] = rng.uniform(-l1, l1);
    for (std::size_t i = shape.w2(); i < shape.b2(); ++i) theta[i] = rng.uniform(-l2, l2);
    return theta;
  }

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, std::uint64_t seed) {
    shape_ = {x.cols(), params_.hidden, classes};
    Rng rng(seed);
    theta_ = initial_weights(shape_, rng);
    std::vector<double> velocity(theta_.size(), 0.0), grad(theta_.size());
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = std::max<std::size_t>(1, params_.batch_size);
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const auto rows = std::span<const std::size_t>(order).subspan(start, std::min(batch, order.size() - start));
        std::fill(grad.begin(), grad.end(), 0.0);
        loss_and_gradient(shape_, theta_, x, y, rows, grad);
        for (std::size_t p = 0; p < theta_.size(); ++p) {
          velocity[p] = params_.momentum * velocity[p] - params_.learning_rate * grad[p];
          theta_[p] += velocity[p];
        }
      }
    }
  }

  Matrix predict_proba(const Matrix& x) const {
    const std::size_t d = shape_.inputs, h = shape_.hidden, k = shape_.outputs;
    Matrix p(x.rows(), k);
    std::vector<double> a(h);
    const std::span<const double> theta(theta_);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t u = 0; u < h; ++u) {
        const double pre = dot(theta.subspan(shape_.w1() + u * d, d), x.row(i)) + theta[shape_.b1() + u];
        a[u] = pre > 0 ? pre : 0.0;
      }
      auto z = p.row(i);
      for (std::size_t c = 0; c < k; ++c) z[c] = dot(theta.subspan(shape_.w2() + c * h, h), a) + theta[shape_.b2() + c];
      softmax(z);
    }
    return p;
  }

  const std::vector<double>& weights() const { return theta_; }
  const Shape& shape() const { return shape_; }

  void save(BinaryWriter& w) const {
    w.u64(params_.hidden);
    w.f64(params_.learning_rate);
    w.f64(params_.momentum);
    w.i64(params_.epochs);
    w.u64(params_.batch_size);
    w.u64(shape_.inputs);
    w.u64(shape_.hidden);
    w.u64(shape_.outputs);
    w.f64s(theta_);
  }
  static Mlp load(BinaryReader& r) {
    MlpParams p;
    p.hidden = r.u64();
    p.learning_rate = r.f64();
    p.momentum = r.f64();
    p.epochs = static_cast<int>(r.i64());
    p.batch_size = r.u64();
    Mlp m(p);
    m.shape_.inputs = r.u64();
    m.shape_.hidden = r.u64();
    m.shape_.outputs = r.u64();
    m.theta_ = r.f64s();
    if (m.theta_.size() != m.shape_.size()) throw Error("model file: MLP weight count mismatch");
    return m;
  }

  bool operator==(const Mlp&) const = default;

 private:
  MlpParams params_;
  Shape shape_;
  std::vector<double> theta_;
};

}  // namespace styx::ml
