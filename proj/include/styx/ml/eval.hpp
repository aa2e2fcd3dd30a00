#pragma once

#include <array>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "styx/corpus.hpp"
#include "styx/error.hpp"
#include "styx/ml/stacking.hpp"

namespace styx::ml {

struct ClassScore {
  double precision = 0;
  double recall = 0;
  std::size_t support = 0;
  bool precision_undefined = false;  // class never predicted
  bool recall_undefined = false;     // class absent from the labels
};

struct EvalReport {
  double accuracy = 0;
  std::array<ClassScore, kClassCount> per_class{};
  std::array<std::array<std::size_t, kClassCount>, kClassCount> confusion{};  // [true][predicted]
  std::size_t total = 0;
};

inline EvalReport report_from_confusion(const std::array<std::array<std::size_t, kClassCount>, kClassCount>& cm) {
  EvalReport r;
  r.confusion = cm;
  std::size_t trace = 0;
  for (std::size_t t = 0; t < kClassCount; ++t)
    for (std::size_t p = 0; p < kClassCount; ++p) {
      r.total += cm[t][p];
      if (t == p) trace += cm[t][p];
    }
  if (r.total == 0) throw Error("evaluation set is empty");
  r.accuracy = static_cast<double>(trace) / static_cast<double>(r.total);
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < kClassCount; ++t) predicted += cm[t][c];
    ClassScore& s = r.per_class[c];
    for (std::size_t p = 0; p < kClassCount; ++p) s.support += cm[c][p];
    s.recall_undefined = s.support == 0;
    s.precision_undefined = predicted == 0;
    s.recall = s.support ? static_cast<double>(cm[c][c]) / static_cast<double>(s.support) : 0.0;
    s.precision = predicted ? static_cast<double>(cm[c][c]) / static_cast<double>(predicted) : 0.0;
  }
  return r;
}

inline EvalReport evaluate_labels(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error("evaluate: label count mismatch");
  std::array<std::array<std::size_t, kClassCount>, kClassCount> cm{};
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm[truth[i]][predicted[i]];
  return report_from_confusion(cm);
}

inline EvalReport evaluate(const StackedModel& model, const SparseRows& x, std::span<const int> y) {
  if (x.empty()) throw Error("evaluation set is empty");
  std::vector<int> predicted;
  for (const auto& p : model.predict(x)) predicted.push_back(encode(p.group));
  return evaluate_labels(y, predicted);
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["total"] = r.total;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& s = r.per_class[c];
    nlohmann::ordered_json cj;
    cj["precision"] = s.precision;
    cj["recall"] = s.recall;
    cj["support"] = s.support;
    if (s.precision_undefined) cj["precision_undefined"] = true;
    if (s.recall_undefined) cj["recall_undefined"] = true;
    j["per_class"][std::string(to_string(decode(static_cast<int>(c))))] = cj;
  }
  j["middle_aged_recall"] = r.per_class[encode(AgeGroup::MiddleAged)].recall;
  j["confusion_matrix"] = nlohmann::ordered_json::array();
  for (const auto& row : r.confusion) j["confusion_matrix"].push_back(row);
  return j;
}

}  // namespace styx::ml
