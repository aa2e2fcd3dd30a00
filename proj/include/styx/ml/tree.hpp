#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "styx/ml/binary_io.hpp"
#include "styx/ml/matrix.hpp"
#include "styx/random.hpp"

namespace styx::ml {

/// Binary decision tree with a fixed-width value vector at each leaf
/// (class probabilities for classification, one score for regression).
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    int value = 0;  // offset into `values` for leaves
    bool operator==(const Node&) const = default;
  };

  std::size_t value_width = 1;
  std::vector<Node> nodes;
  std::vector<double> values;

  std::span<const double> leaf(std::span<const double> x) const {
    int n = 0;
    while (nodes[n].feature >= 0) n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
    return {values.data() + nodes[n].value, value_width};
  }

  std::size_t depth() const {
    std::function<std::size_t(int)> rec = [&](int n) -> std::size_t {
      return nodes[n].feature < 0 ? 0 : 1 + std::max(rec(nodes[n].left), rec(nodes[n].right));
    };
    return nodes.empty() ? 0 : rec(0);
  }

  void save(BinaryWriter& w) const {
    w.u64(value_width);
    w.u64(nodes.size());
    for (const Node& n : nodes) {
      w.i64(n.feature);
      w.f64(n.threshold);
      w.i64(n.left);
      w.i64(n.right);
      w.i64(n.value);
    }
    w.f64s(values);
  }

  static DecisionTree load(BinaryReader& r) {
    DecisionTree t;
    t.value_width = r.u64();
    const auto count = r.u64();
    if (count > r.remaining() / 40) throw Error("model file: tree node count exceeds payload");
    t.nodes.resize(count);
    for (Node& n : t.nodes) {
      n.feature = static_cast<int>(r.i64());
      n.threshold = r.f64();
      n.left = static_cast<int>(r.i64());
      n.right = static_cast<int>(r.i64());
      n.value = static_cast<int>(r.i64());
    }
    t.values = r.f64s();
    const int nn = static_cast<int>(t.nodes.size());
    for (const Node& n : t.nodes) {
      const bool bad_split = n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= nn || n.right >= nn);
      const bool bad_leaf = n.feature < 0 && (n.value < 0 || n.value + t.value_width > t.values.size());
      if (bad_split || bad_leaf) throw Error("model file: corrupt tree");
    }
    if (t.nodes.empty()) throw Error("model file: empty tree");
    return t;
  }

  bool operator==(const DecisionTree&) const = default;
};

/// Feature-major sample order, computed once per training matrix and reused
/// by every tree grown on it. Ties keep row order.
struct PresortedColumns {
  std::vector<std::vector<std::uint32_t>> order;

  explicit PresortedColumns(const Matrix& x) : order(x.cols()) {
    for (std::size_t f = 0; f < x.cols(); ++f) {
      auto& o = order[f];
      o.resize(x.rows());
      std::iota(o.begin(), o.end(), 0u);
      std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }
  }
};

struct TreeGrowth {
  std::size_t max_depth = 3;
  std::size_t features_per_split = 0;  // 0 = all features
  double min_gain = 1e-12;
};

/// Grows a tree level by level. `Criterion` supplies:
///   stats_width, value_width             accumulator and leaf-value sizes
///   add(sample, weight, stats)           accumulate one sample
///   score(stats)                         split quality is the increase in score
///   leaf(stats, value)                   a node's stored value
///
/// Growth detail: Each level scans every feature's presorted
/// order once, so the cost per level is O(features x samples). Samples with
/// zero weight take no part. Candidate thresholds are midpoints between
/// consecutive distinct values; the first best split wins ties.
template <typename Criterion>
DecisionTree grow_tree(const Matrix& x, const PresortedColumns& sorted, std::span<const double> weights,
                       const Criterion& crit, const TreeGrowth& growth, Rng* rng = nullptr) {
  const std::size_t n = x.rows(), d = x.cols(), S = crit.stats_width;
  DecisionTree tree;
  tree.value_width = crit.value_width;

  struct Frontier {
    int node;
    std::vector<double> total;
    std::vector<bool> uses;  // features this node may split on
    std::size_t count = 0;   // samples with positive weight
    double best_gain = 0;
    int best_feature = -1;
    double best_threshold = 0;
  };

  const auto draw_features = [&]() {
    std::vector<bool> uses(d, true);
    if (growth.features_per_split == 0 || growth.features_per_split >= d || !rng) return uses;
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < growth.features_per_split; ++i) std::swap(idx[i], idx[i + rng->below(d - i)]);
    std::fill(uses.begin(), uses.end(), false);
    for (std::size_t i = 0; i < growth.features_per_split; ++i) uses[idx[i]] = true;
    return uses;
  };

  std::vector<int> slot(n, -1);  // frontier slot of each sample, -1 when settled or unused
  std::vector<Frontier> frontier;
  tree.nodes.push_back({});
  frontier.push_back({0, std::vector<double>(S, 0.0), draw_features()});
  for (std::size_t i = 0; i < n; ++i)
    if (weights[i] > 0) {
      slot[i] = 0;
      crit.add(i, weights[i], std::span<double>(frontier[0].total));
      ++frontier[0].count;
    }

  const auto make_leaf = [&](const Frontier& f) {
    DecisionTree::Node& node = tree.nodes[f.node];
    node.feature = -1;
    node.value = static_cast<int>(tree.values.size());
    tree.values.resize(tree.values.size() + crit.value_width, 0.0);
    crit.leaf(std::span<const double>(f.total), std::span<double>(tree.values).subspan(node.value, crit.value_width));
  };

  std::vector<double> left(S);
  std::vector<double> left_all;
  std::vector<double> last_value;
  std::vector<std::size_t> left_count;
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    if (depth < growth.max_depth) {
      const std::size_t m = frontier.size();
      left_all.assign(m * S, 0.0);
      last_value.assign(m, 0.0);
      left_count.assign(m, 0);
      std::vector<double> parent_score(m);
      for (std::size_t s = 0; s < m; ++s) parent_score[s] = crit.score(std::span<const double>(frontier[s].total));
      std::vector<double> right(S);

      for (std::size_t f = 0; f < d; ++f) {
        std::fill(left_all.begin(), left_all.end(), 0.0);
        std::fill(left_count.begin(), left_count.end(), 0);
        for (std::uint32_t i : sorted.order[f]) {
          const int s = slot[i];
          if (s < 0) continue;
          Frontier& fr = frontier[s];
          if (fr.count < 2 || !fr.uses[f]) continue;
          const double v = x(i, f);
          std::span<double> l(left_all.data() + s * S, S);
          if (left_count[s] > 0 && v > last_value[s]) {
            for (std::size_t k = 0; k < S; ++k) right[k] = fr.total[k] - l[k];
            const double gain = crit.score(std::span<const double>(l)) + crit.score(std::span<const double>(right)) - parent_score[s];
            if (gain > fr.best_gain + growth.min_gain) {
              fr.best_gain = gain;
              fr.best_feature = static_cast<int>(f);
              fr.best_threshold = last_value[s] + (v - last_value[s]) / 2.0;
              if (!(fr.best_threshold < v)) fr.best_threshold = last_value[s];
            }
          }
          crit.add(i, weights[i], l);
          ++left_count[s];
          last_value[s] = v;
        }
      }
    }

    std::vector<Frontier> next;
    std::vector<int> child_slot(frontier.size() * 2, -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      Frontier& fr = frontier[s];
      if (fr.best_feature < 0) {
        make_leaf(fr);
        continue;
      }
      const int left = static_cast<int>(tree.nodes.size());
      {
        DecisionTree::Node& node = tree.nodes[fr.node];
        node.feature = fr.best_feature;
        node.threshold = fr.best_threshold;
        node.left = left;
        node.right = left + 1;
      }
      tree.nodes.resize(tree.nodes.size() + 2);  // invalidates node references
      child_slot[2 * s] = static_cast<int>(next.size());
      next.push_back({left, std::vector<double>(S, 0.0), draw_features()});
      child_slot[2 * s + 1] = static_cast<int>(next.size());
      next.push_back({left + 1, std::vector<double>(S, 0.0), draw_features()});
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int s = slot[i];
      if (s < 0) continue;
      const Frontier& fr = frontier[s];
      if (fr.best_feature < 0) {
        slot[i] = -1;
        continue;
      }
      const bool go_left = x(i, fr.best_feature) <= fr.best_threshold;
      const int c = child_slot[2 * s + (go_left ? 0 : 1)];
      slot[i] = c;
      crit.add(i, weights[i], std::span<double>(next[c].total));
      ++next[c].count;
    }
    frontier = std::move(next);
  }
  return tree;
}

}  // namespace styx::ml
