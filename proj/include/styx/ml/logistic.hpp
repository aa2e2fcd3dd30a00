#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "styx/error.hpp"
#include "styx/ml/binary_io.hpp"
#include "styx/ml/matrix.hpp"

namespace styx::ml {

struct LogisticParams {
  double l2 = 1e-4;
  int max_iter = 500;
  double tol = 1e-6;
  double learning_rate = 0.5;  // initial step; halved whenever a step raises the loss
  bool operator==(const LogisticParams&) const = default;
};

/// Multinomial softmax regression fit by full-batch gradient descent.
/// Parameters are a K x (d + 1) matrix; the last column is the bias.
class LogisticRegression {
 public:
  LogisticRegression() = default;
  explicit LogisticRegression(LogisticParams p) : params_(p) {}

  /// Mean cross-entropy plus (l2 / 2) * ||W||^2 over non-bias weights.
  /// Writes the gradient into `grad` (same shape as `w`) when non-null.
  static double loss_and_gradient(const Matrix& w, const Matrix& x, std::span<const int> y, double l2, Matrix* grad) {
    const std::size_t n = x.rows(), d = x.cols(), k = w.rows();
    if (grad) *grad = Matrix(k, d + 1);
    double loss = 0;
    std::vector<double> z(k);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.row(i);
      for (std::size_t c = 0; c < k; ++c) z[c] = dot(w.row(c).first(d), xi) + w(c, d);
      softmax(z);
      loss -= std::log(std::max(z[y[i]], 1e-300));
      if (!grad) continue;
      for (std::size_t c = 0; c < k; ++c) {
        const double r = z[c] - (static_cast<int>(c) == y[i] ? 1.0 : 0.0);
        auto g = grad->row(c);
        for (std::size_t j = 0; j < d; ++j) g[j] += r * xi[j];
        g[d] += r;
      }
    }
    const double inv = 1.0 / static_cast<double>(n);
    loss *= inv;
    double reg = 0;
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < d; ++j) reg += w(c, j) * w(c, j);
    loss += 0.5 * l2 * reg;
    if (grad)
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j <= d; ++j) {
          (*grad)(c, j) *= inv;
          if (j < d) (*grad)(c, j) += l2 * w(c, j);
        }
    return loss;
  }

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes) {
    w_ = Matrix(classes, x.cols() + 1);
    Matrix grad, trial;
    double step = params_.learning_rate;
    double loss = loss_and_gradient(w_, x, y, params_.l2, &grad);
    for (int it = 0; it < params_.max_iter; ++it) {
      double gmax = 0;
      for (double g : grad.data()) gmax = std::max(gmax, std::abs(g));
      if (gmax < params_.tol) break;
      trial = w_;
      for (std::size_t i = 0; i < trial.data().size(); ++i) trial.data()[i] -= step * grad.data()[i];
      Matrix trial_grad;
      const double trial_loss = loss_and_gradient(trial, x, y, params_.l2, &trial_grad);
      if (trial_loss > loss) {
        step /= 2;
        if (step < 1e-12) break;
        continue;
      }
      const bool converged = loss - trial_loss < params_.tol * std::max(1.0, loss);
      w_ = std::move(trial);
      grad = std::move(trial_grad);
      loss = trial_loss;
      if (converged) break;
    }
  }

  Matrix predict_proba(const Matrix& x) const {
    const std::size_t d = x.cols(), k = w_.rows();
    Matrix p(x.rows(), k);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto z = p.row(i);
      for (std::size_t c = 0; c < k; ++c) z[c] = dot(w_.row(c).first(d), x.row(i)) + w_(c, d);
      softmax(z);
    }
    return p;
  }

  const Matrix& weights() const { return w_; }

  void save(BinaryWriter& w) const {
    w.f64(params_.l2);
    w.i64(params_.max_iter);
    w.f64(params_.tol);
    w.f64(params_.learning_rate);
    w.matrix(w_);
  }
  static LogisticRegression load(BinaryReader& r) {
    LogisticParams p;
    p.l2 = r.f64();
    p.max_iter = static_cast<int>(r.i64());
    p.tol = r.f64();
    p.learning_rate = r.f64();
    LogisticRegression m(p);
    m.w_ = r.matrix();
    return m;
  }

  bool operator==(const LogisticRegression&) const = default;

 private:
  LogisticParams params_;
  Matrix w_;
};

}  // namespace styx::ml
