#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "styx/corpus.hpp"
#include "styx/error.hpp"
#include "styx/ml/learner.hpp"
#include "styx/ml/pca.hpp"
#include "styx/ml/scaler.hpp"
#include "styx/random.hpp"

namespace styx::ml {

inline constexpr std::size_t kClassCount = 3;

/// Label codec: Young = 0, MiddleAged = 1, Old = 2.
inline int encode(AgeGroup g) { return static_cast<int>(g); }
inline AgeGroup decode(int label) {
  if (label < 0 || label > 2) throw Error("label out of range: " + std::to_string(label));
  return static_cast<AgeGroup>(label);
}

/// splitmix64 finalizer over (seed, a, b): distinct, schedule-free seeds for
/// each (learner, fold) unit.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct StackedOptions {
  std::size_t folds = 5;
  std::size_t pca_components = 5;
  Hyperparameters hyper;
  bool operator==(const StackedOptions&) const = default;
};

struct Prediction {
  AgeGroup group;
  std::array<double, kClassCount> probabilities;
};

/// Scaler -> PCA -> five base learners -> boosted-tree meta-learner over
/// the concatenated base probabilities (5 x 3 = 15 inputs).
struct StackedModel {
  std::vector<std::string> feature_names;
  Scaler scaler;
  PcaModel pca;
  std::vector<Learner> bases;
  GradientBoosting meta;
  StackedOptions options;
  std::uint64_t seed = 0;

  std::size_t meta_width() const { return bases.size() * kClassCount; }

  Matrix base_features(const Matrix& projected) const {
    Matrix z(projected.rows(), meta_width());
    for (std::size_t b = 0; b < bases.size(); ++b) {
      const Matrix p = ml::predict_proba(bases[b], projected);
      for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t c = 0; c < kClassCount; ++c) z(i, b * kClassCount + c) = p(i, c);
    }
    return z;
  }

  Matrix predict_proba(const SparseRows& rows) const {
    return meta.predict_proba(base_features(pca.transform(scaler.transform(rows))));
  }

  std::vector<Prediction> predict(const SparseRows& rows) const {
    const Matrix p = predict_proba(rows);
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < p.rows(); ++i) {
      Prediction pr{decode(static_cast<int>(argmax(p.row(i)))), {}};
      std::copy(p.row(i).begin(), p.row(i).end(), pr.probabilities.begin());
      out.push_back(pr);
    }
    return out;
  }

  Prediction predict(const std::vector<std::optional<double>>& row) const { return predict(SparseRows{row}).front(); }
};

/// Stratified fold assignment: each class's rows are shuffled and dealt
/// round-robin, so with at least `folds` rows per class every fold holds
/// every class.
inline std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t folds, std::uint64_t seed) {
  std::vector<std::size_t> fold_of(y.size());
  Rng rng(seed);
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == static_cast<int>(c)) members.push_back(i);
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t j = 0; j < members.size(); ++j) fold_of[members[j]] = j % folds;
  }
  return fold_of;
}

struct StackedFit {
  StackedModel model;
  Matrix projected;                 // training rows after scaler and PCA
  Matrix out_of_fold;               // n x 15 meta-learner training matrix
  std::vector<std::size_t> fold_of; // fold held out for each row
};

/// Fits the full stack. For every fold, each base learner is trained on the
/// other folds and predicts the held-out rows; those out-of-fold
/// probabilities train the meta-learner. Base learners are then refit on
/// all rows for inference. Learner b in fold f is seeded with
/// derive_seed(seed, b, f); the final refit uses f = folds.
inline StackedFit fit_stacked_detailed(const SparseRows& x, std::span<const int> y, std::uint64_t seed,
                                       const StackedOptions& opt = {}, std::vector<std::string> feature_names = {}) {
  if (x.size() != y.size()) throw Error("fit_stacked: row/label count mismatch");
  if (opt.folds < 2) throw Error("fit_stacked: need at least 2 folds");
  std::array<std::size_t, kClassCount> counts{};
  for (int v : y) {
    if (v < 0 || v >= static_cast<int>(kClassCount)) throw Error("fit_stacked: label out of range");
    ++counts[v];
  }
  for (std::size_t c = 0; c < kClassCount; ++c)
    if (counts[c] < opt.folds)
      throw Error("fit_stacked: class " + std::string(to_string(decode(static_cast<int>(c)))) + " has " +
                  std::to_string(counts[c]) + " samples, fewer than " + std::to_string(opt.folds) + " folds");

  StackedFit fit;
  StackedModel& m = fit.model;
  m.options = opt;
  m.seed = seed;
  m.feature_names = std::move(feature_names);
  m.scaler = fit_scaler(x);
  const Matrix standardized = m.scaler.transform(x);
  m.pca = fit_pca(standardized, opt.pca_components);
  fit.projected = m.pca.transform(standardized);

  const std::size_t n = y.size();
  fit.fold_of = stratified_folds(y, opt.folds, derive_seed(seed, 0xF01D));
  fit.out_of_fold = Matrix(n, kBaseLearners.size() * kClassCount);
  for (std::size_t f = 0; f < opt.folds; ++f) {
    std::vector<std::size_t> train, held;
    for (std::size_t i = 0; i < n; ++i) (fit.fold_of[i] == f ? held : train).push_back(i);
    const Matrix xt = fit.projected.select_rows(train), xh = fit.projected.select_rows(held);
    std::vector<int> yt;
    for (std::size_t i : train) yt.push_back(y[i]);
    for (std::size_t b = 0; b < kBaseLearners.size(); ++b) {
      const Learner l = fit_base(kBaseLearners[b], xt, yt, kClassCount, derive_seed(seed, b, f), opt.hyper);
      const Matrix p = ml::predict_proba(l, xh);
      for (std::size_t r = 0; r < held.size(); ++r)
        for (std::size_t c = 0; c < kClassCount; ++c) fit.out_of_fold(held[r], b * kClassCount + c) = p(r, c);
    }
  }
  m.meta = GradientBoosting(opt.hyper.meta);
  m.meta.fit(fit.out_of_fold, y, kClassCount);
  for (std::size_t b = 0; b < kBaseLearners.size(); ++b)
    m.bases.push_back(fit_base(kBaseLearners[b], fit.projected, y, kClassCount, derive_seed(seed, b, opt.folds), opt.hyper));
  return fit;
}

inline StackedModel fit_stacked(const SparseRows& x, std::span<const int> y, std::uint64_t seed,
                                const StackedOptions& opt = {}, std::vector<std::string> feature_names = {}) {
  return fit_stacked_detailed(x, y, seed, opt, std::move(feature_names)).model;
}

}  // namespace styx::ml
