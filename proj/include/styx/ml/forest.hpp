#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "styx/ml/binary_io.hpp"
#include "styx/ml/matrix.hpp"
#include "styx/ml/tree.hpp"
#include "styx/random.hpp"

namespace styx::ml {

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_depth = 12;
  bool operator==(const ForestParams&) const = default;
};

/// Gini impurity criterion: stats are per-class sample weights and the
/// leaf value is the class distribution.
struct GiniCriterion {
  std::span<const int> labels;
  std::size_t stats_width;
  std::size_t value_width;

  GiniCriterion(std::span<const int> y, std::size_t classes) : labels(y), stats_width(classes), value_width(classes) {}

  void add(std::size_t i, double w, std::span<double> stats) const { stats[labels[i]] += w; }

  // Weighted impurity decrease is W*gini(parent) - sum W_c*gini(c), which
  // equals the increase in sum_k(n_k^2) / W.
  double score(std::span<const double> stats) const {
    double total = 0, sq = 0;
    for (double v : stats) {
      total += v;
      sq += v * v;
    }
    return total > 0 ? sq / total : 0.0;
  }

  void leaf(std::span<const double> stats, std::span<double> value) const {
    double total = 0;
    for (double v : stats) total += v;
    for (std::size_t k = 0; k < stats.size(); ++k) value[k] = total > 0 ? stats[k] / total : 1.0 / stats.size();
  }
};

/// Bagged CART classifiers with sqrt(d) candidate features per split. Tree
/// t draws its bootstrap sample and feature subsets from seed + t, so trees
/// are independent of one another and of fitting order.
class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(ForestParams p) : params_(p) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, std::uint64_t seed) {
    classes_ = classes;
    trees_.clear();
    const PresortedColumns sorted(x);
    const GiniCriterion crit(y, classes);
    TreeGrowth growth;
    growth.max_depth = params_.max_depth;
    growth.features_per_split = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
    std::vector<double> weights(x.rows());
    for (std::size_t t = 0; t < params_.trees; ++t) {
      Rng rng(seed + t);
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t i = 0; i < x.rows(); ++i) weights[rng.below(x.rows())] += 1.0;
      trees_.push_back(grow_tree(x, sorted, weights, crit, growth, &rng));
    }
  }

  Matrix predict_proba(const Matrix& x) const {
    Matrix p(x.rows(), classes_);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto out = p.row(i);
      for (const auto& t : trees_) {
        const auto leaf = t.leaf(x.row(i));
        for (std::size_t k = 0; k < classes_; ++k) out[k] += leaf[k];
      }
      for (double& v : out) v /= static_cast<double>(trees_.size());
    }
    return p;
  }

  const std::vector<DecisionTree>& trees() const { return trees_; }

  void save(BinaryWriter& w) const {
    w.u64(params_.trees);
    w.u64(params_.max_depth);
    w.u64(classes_);
    w.u64(trees_.size());
    for (const auto& t : trees_) t.save(w);
  }
  static RandomForest load(BinaryReader& r) {
    ForestParams p;
    p.trees = r.u64();
    p.max_depth = r.u64();
    RandomForest f(p);
    f.classes_ = r.u64();
    const auto n = r.u64();
    if (n > r.remaining()) throw Error("model file: forest size exceeds payload");
    for (std::uint64_t i = 0; i < n; ++i) {
      f.trees_.push_back(DecisionTree::load(r));
      if (f.trees_.back().value_width != f.classes_) throw Error("model file: forest leaf width mismatch");
    }
    if (f.trees_.empty()) throw Error("model file: empty forest");
    return f;
  }

  bool operator==(const RandomForest&) const = default;

 private:
  ForestParams params_;
  std::size_t classes_ = 0;
  std::vector<DecisionTree> trees_;
};

}  // namespace styx::ml
