#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "styx/ml/binary_io.hpp"
#include "styx/ml/matrix.hpp"
#include "styx/random.hpp"

namespace styx::ml {

struct SvmParams {
  double l2 = 1e-3;
  int epochs = 200;
  double learning_rate = 0.1;  // eta_t = eta0 / (1 + eta0 * l2 * t)
  bool operator==(const SvmParams&) const = default;
};

/// One-vs-rest linear SVM on the L2-regularized hinge loss, trained by
/// per-sample subgradient steps. Class probabilities are the softmax of
/// the K margins.
class LinearSvm {
 public:
  LinearSvm() = default;
  explicit LinearSvm(SvmParams p) : params_(p) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, std::uint64_t seed) {
    const std::size_t n = x.rows(), d = x.cols();
    w_ = Matrix(classes, d + 1);
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    double t = 0;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
      rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t i : order) {
        const double eta = params_.learning_rate / (1.0 + params_.learning_rate * params_.l2 * t);
        t += 1;
        const auto xi = x.row(i);
        for (std::size_t c = 0; c < classes; ++c) {
          auto w = w_.row(c);
          const double target = y[i] == static_cast<int>(c) ? 1.0 : -1.0;
          const double margin = target * (dot(w.first(d), xi) + w[d]);
          const double shrink = 1.0 - eta * params_.l2;
          for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
          if (margin < 1.0) {
            for (std::size_t j = 0; j < d; ++j) w[j] += eta * target * xi[j];
            w[d] += eta * target;
          }
        }
      }
    }
  }

  Matrix decision_function(const Matrix& x) const {
    const std::size_t d = x.cols(), k = w_.rows();
    Matrix m(x.rows(), k);
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t c = 0; c < k; ++c) m(i, c) = dot(w_.row(c).first(d), x.row(i)) + w_(c, d);
    return m;
  }

  Matrix predict_proba(const Matrix& x) const {
    Matrix p = decision_function(x);
    for (std::size_t i = 0; i < p.rows(); ++i) softmax(p.row(i));
    return p;
  }

  void save(BinaryWriter& w) const {
    w.f64(params_.l2);
    w.i64(params_.epochs);
    w.f64(params_.learning_rate);
    w.matrix(w_);
  }
  static LinearSvm load(BinaryReader& r) {
    SvmParams p;
    p.l2 = r.f64();
    p.epochs = static_cast<int>(r.i64());
    p.learning_rate = r.f64();
    LinearSvm s(p);
    s.w_ = r.matrix();
    return s;
  }

  bool operator==(const LinearSvm&) const = default;

 private:
  SvmParams params_;
  Matrix w_;
};

}  // namespace styx::ml
