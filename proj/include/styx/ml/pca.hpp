#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "styx/error.hpp"
#include "styx/ml/matrix.hpp"

namespace styx::ml {

struct PcaModel {
  std::vector<double> mean;            // column means of the fitting data
  Matrix components;                   // k x d, orthonormal rows
  std::vector<double> eigenvalues;     // top k, non-increasing
  std::vector<double> explained_ratio; // eigenvalue / total variance

  std::size_t k() const { return components.rows(); }

  /// Projects rows onto the components: (x - mean) C^T.
  Matrix transform(const Matrix& x) const {
    if (x.cols() != mean.size()) throw Error("pca: input width mismatch");
    Matrix out(x.rows(), k());
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t c = 0; c < k(); ++c) {
        double s = 0;
        for (std::size_t j = 0; j < mean.size(); ++j) s += (x(i, j) - mean[j]) * components(c, j);
        out(i, c) = s;
      }
    return out;
  }

  /// mean + z C, the inverse of transform when k equals the rank.
  Matrix reconstruct(const Matrix& z) const {
    Matrix out(z.rows(), mean.size());
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t j = 0; j < mean.size(); ++j) {
        double s = mean[j];
        for (std::size_t c = 0; c < k(); ++c) s += z(i, c) * components(c, j);
        out(i, j) = s;
      }
    return out;
  }

  bool operator==(const PcaModel&) const = default;
};

/// Flips v so its largest-magnitude entry (first one on ties) is positive.
inline void normalize_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (v[best] < 0)
    for (double& x : v) x = -x;
}

/// Sample covariance (n - 1) of the columns of x.
inline Matrix covariance(const Matrix& x, std::vector<double>* means = nullptr) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> mu(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mu[j] += x(i, j);
  for (double& m : mu) m /= static_cast<double>(n);
  Matrix cov(d, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      const double da = x(i, a) - mu[a];
      for (std::size_t b = a; b < d; ++b) cov(a, b) += da * (x(i, b) - mu[b]);
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      cov(a, b) /= static_cast<double>(n - 1);
      cov(b, a) = cov(a, b);
    }
  if (means) *means = std::move(mu);
  return cov;
}

/// Top-k principal axes of the sample covariance matrix.
inline PcaModel fit_pca(const Matrix& x, std::size_t k) {
  if (k == 0) throw Error("pca: k must be positive");
  if (x.rows() < k || x.cols() < k)
    throw Error("pca: need at least k=" + std::to_string(k) + " rows and columns, got " + std::to_string(x.rows()) +
                "x" + std::to_string(x.cols()));
  PcaModel m;
  const Matrix cov = covariance(x, &m.mean);
  const SymmetricEigen eig = jacobi_eigen(cov);

  double total = 0;
  for (std::size_t j = 0; j < cov.rows(); ++j) total += cov(j, j);
  const double top = eig.values.empty() ? 0.0 : eig.values.front();
  std::size_t rank = 0;
  for (double ev : eig.values)
    if (ev > 1e-10 * std::max(top, 1e-300)) ++rank;
  if (k > rank)
    throw Error("pca: requested " + std::to_string(k) + " components but data has rank " + std::to_string(rank));

  const std::size_t d = x.cols();
  m.components = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) m.components(c, j) = eig.vectors(j, c);
    normalize_sign(m.components.row(c));
    m.eigenvalues.push_back(eig.values[c]);
    m.explained_ratio.push_back(total > 0 ? eig.values[c] / total : 0.0);
  }
  return m;
}

}  // namespace styx::ml
