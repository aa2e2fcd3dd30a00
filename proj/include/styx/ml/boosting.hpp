#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "styx/ml/binary_io.hpp"
#include "styx/ml/matrix.hpp"
#include "styx/ml/tree.hpp"

namespace styx::ml {

struct BoostingParams {
  std::size_t rounds = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  bool operator==(const BoostingParams&) const = default;
};

/// Squared-error split search on residuals with a one-step Newton leaf:
/// stats = (weight, sum r, sum p(1-p)).
struct NewtonCriterion {
  std::span<const double> residual;
  std::span<const double> hessian;
  double leaf_scale = 1.0;  // (K - 1) / K for K-class softmax boosting
  std::size_t stats_width = 3;
  std::size_t value_width = 1;

  void add(std::size_t i, double w, std::span<double> stats) const {
    stats[0] += w;
    stats[1] += w * residual[i];
    stats[2] += w * hessian[i];
  }
  double score(std::span<const double> stats) const { return stats[0] > 0 ? stats[1] * stats[1] / stats[0] : 0.0; }
  void leaf(std::span<const double> stats, std::span<double> value) const {
    value[0] = stats[2] > 1e-12 ? leaf_scale * stats[1] / stats[2] : 0.0;
  }
};

/// Multiclass gradient boosting on the softmax cross-entropy: every round
/// fits one regression tree per class to the residuals y_k - p_k.
class GradientBoosting {
 public:
  GradientBoosting() = default;
  explicit GradientBoosting(BoostingParams p) : params_(p) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes) {
    const std::size_t n = x.rows(), k = classes;
    classes_ = classes;
    trees_.clear();
    base_.assign(k, 0.0);
    std::vector<double> prior(k, 0.0);
    for (int label : y) prior[label] += 1.0;
    for (std::size_t c = 0; c < k; ++c) base_[c] = std::log(std::max(prior[c], 1.0) / static_cast<double>(n));

    Matrix score(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < k; ++c) score(i, c) = base_[c];

    const PresortedColumns sorted(x);
    const std::vector<double> weights(n, 1.0);
    TreeGrowth growth;
    growth.max_depth = params_.max_depth;
    std::vector<double> residual(n), hessian(n);
    Matrix prob(n, k);
    for (std::size_t round = 0; round < params_.rounds; ++round) {
      for (std::size_t i = 0; i < n; ++i) {
        std::copy(score.row(i).begin(), score.row(i).end(), prob.row(i).begin());
        softmax(prob.row(i));
      }
      for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
          const double p = prob(i, c);
          residual[i] = (y[i] == static_cast<int>(c) ? 1.0 : 0.0) - p;
          hessian[i] = p * (1.0 - p);
        }
        const NewtonCriterion crit{residual, hessian, static_cast<double>(k - 1) / static_cast<double>(k)};
        DecisionTree tree = grow_tree(x, sorted, weights, crit, growth);
        for (std::size_t i = 0; i < n; ++i) score(i, c) += params_.learning_rate * tree.leaf(x.row(i))[0];
        trees_.push_back(std::move(tree));
      }
    }
  }

  Matrix predict_proba(const Matrix& x) const {
    Matrix p(x.rows(), classes_);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto z = p.row(i);
      for (std::size_t c = 0; c < classes_; ++c) z[c] = base_[c];
      for (std::size_t t = 0; t < trees_.size(); ++t)
        z[t % classes_] += params_.learning_rate * trees_[t].leaf(x.row(i))[0];
      softmax(z);
    }
    return p;
  }

  std::size_t tree_count() const { return trees_.size(); }

  void save(BinaryWriter& w) const {
    w.u64(params_.rounds);
    w.u64(params_.max_depth);
    w.f64(params_.learning_rate);
    w.u64(classes_);
    w.f64s(base_);
    w.u64(trees_.size());
    for (const auto& t : trees_) t.save(w);
  }
  static GradientBoosting load(BinaryReader& r) {
    BoostingParams p;
    p.rounds = r.u64();
    p.max_depth = r.u64();
    p.learning_rate = r.f64();
    GradientBoosting g(p);
    g.classes_ = r.u64();
    g.base_ = r.f64s();
    const auto n = r.u64();
    if (n > r.remaining()) throw Error("model file: boosting size exceeds payload");
    for (std::uint64_t i = 0; i < n; ++i) g.trees_.push_back(DecisionTree::load(r));
    if (g.classes_ == 0 || g.base_.size() != g.classes_ || g.trees_.size() % g.classes_ != 0)
      throw Error("model file: corrupt boosting model");
    return g;
  }

  bool operator==(const GradientBoosting&) const = default;

 private:
  BoostingParams params_;
  std::size_t classes_ = 0;
  std::vector<double> base_;
  std::vector<DecisionTree> trees_;  // round-major, class-minor
};

}  // namespace styx::ml
