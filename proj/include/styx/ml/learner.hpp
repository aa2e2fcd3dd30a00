#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "styx/error.hpp"
#include "styx/ml/boosting.hpp"
#include "styx/ml/forest.hpp"
#include "styx/ml/logistic.hpp"
#include "styx/ml/mlp.hpp"
#include "styx/ml/svm.hpp"

namespace styx::ml {

enum class LearnerKind : std::uint8_t { LogisticRegression, RandomForest, GradientBoosting, LinearSvm, Mlp };

inline constexpr std::array<LearnerKind, 5> kBaseLearners = {LearnerKind::LogisticRegression, LearnerKind::RandomForest,
                                                            LearnerKind::GradientBoosting, LearnerKind::LinearSvm,
                                                            LearnerKind::Mlp};

inline constexpr std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::LogisticRegression: return "logistic_regression";
    case LearnerKind::RandomForest: return "random_forest";
    case LearnerKind::GradientBoosting: return "gradient_boosting";
    case LearnerKind::LinearSvm: return "linear_svm";
    case LearnerKind::Mlp: return "mlp";
  }
  return "?";
}

struct Hyperparameters {
  LogisticParams logistic;
  ForestParams forest;
  BoostingParams boosting;
  SvmParams svm;
  MlpParams mlp;
  BoostingParams meta;
  bool operator==(const Hyperparameters&) const = default;
};

using Learner = std::variant<LogisticRegression, RandomForest, GradientBoosting, LinearSvm, Mlp>;

inline LearnerKind kind_of(const Learner& l) { return static_cast<LearnerKind>(l.index()); }

inline std::size_t count_classes_present(std::span<const int> y, std::size_t classes) {
  std::vector<bool> seen(classes, false);
  for (int v : y) {
    if (v < 0 || static_cast<std::size_t>(v) >= classes) throw Error("label " + std::to_string(v) + " out of range");
    seen[v] = true;
  }
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

/// Fits one base learner. Every learner's predict_proba returns rows on the
/// `classes`-simplex.
inline Learner fit_base(LearnerKind kind, const Matrix& x, std::span<const int> y, std::size_t classes,
                        std::uint64_t seed, const Hyperparameters& hp = {}) {
  if (x.rows() != y.size()) throw Error("fit_base: row/label count mismatch");
  if (count_classes_present(y, classes) < 2) throw Error("fit_base: need at least 2 classes, got a single class");
  switch (kind) {
    case LearnerKind::LogisticRegression: {
      LogisticRegression m(hp.logistic);
      m.fit(x, y, classes);
      return m;
    }
    case LearnerKind::RandomForest: {
      RandomForest m(hp.forest);
      m.fit(x, y, classes, seed);
      return m;
    }
    case LearnerKind::GradientBoosting: {
      GradientBoosting m(hp.boosting);
      m.fit(x, y, classes);
      return m;
    }
    case LearnerKind::LinearSvm: {
      LinearSvm m(hp.svm);
      m.fit(x, y, classes, seed);
      return m;
    }
    case LearnerKind::Mlp: {
      Mlp m(hp.mlp);
      m.fit(x, y, classes, seed);
      return m;
    }
  }
  throw Error("unknown learner kind");
}

inline Matrix predict_proba(const Learner& l, const Matrix& x) {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, l);
}

inline void save_learner(BinaryWriter& w, const Learner& l) {
  w.u8(static_cast<std::uint8_t>(l.index()));
  std::visit([&](const auto& m) { m.save(w); }, l);
}

inline Learner load_learner(BinaryReader& r) {
  switch (static_cast<LearnerKind>(r.u8())) {
    case LearnerKind::LogisticRegression: return LogisticRegression::load(r);
    case LearnerKind::RandomForest: return RandomForest::load(r);
    case LearnerKind::GradientBoosting: return GradientBoosting::load(r);
    case LearnerKind::LinearSvm: return LinearSvm::load(r);
    case LearnerKind::Mlp: return Mlp::load(r);
  }
  throw Error("model file: unknown learner tag");
}

}  // namespace styx::ml
