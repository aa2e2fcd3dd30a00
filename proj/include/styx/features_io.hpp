#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "styx/corpus.hpp"
#include "styx/csv.hpp"
#include "styx/features.hpp"

namespace styx {

struct LabeledFeatures {
  FeatureVector features;
  std::optional<AgeGroup> group;

  bool operator==(const LabeledFeatures&) const = default;
};

/// Featurizes documents on up to `threads` workers. Output order matches
/// input order whatever the schedule.
inline std::vector<FeatureVector> featurize_all(std::span<const ParsedDocument> docs, const MarkerLexicon& markers,
                                                unsigned threads = 1) {
  std::vector<FeatureVector> out(docs.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(docs.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < docs.size(); ++i) out[i] = featurize(docs[i], markers);
    return out;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (docs.size() + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(docs.size(), lo + chunk);
    workers.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = featurize(docs[i], markers);
    });
  }
  return out;
}

inline std::vector<std::string> feature_file_header() {
  std::vector<std::string> h = {"doc_id", "age_group", "word_token_count"};
  for (auto m : kMetricNames) h.emplace_back(m);
  return h;
}

/// CSV: doc_id, age_group, word_token_count, then one column per metric in
/// catalog order. Nulls are empty fields; numbers use shortest round-trip text.
inline void write_features_csv(std::ostream& out, std::span<const LabeledFeatures> rows) {
  csv::write_row(out, feature_file_header());
  for (const auto& [v, g] : rows) {
    std::vector<std::string> fields = {v.doc_id, g ? std::string(to_string(*g)) : std::string(),
                                       std::to_string(v.word_token_count)};
    for (const auto& x : v.values) fields.push_back(x ? format_double(*x) : std::string());
    csv::write_row(out, fields);
  }
}

/// JSON lines with the same keys; nulls are JSON null.
inline void write_features_jsonl(std::ostream& out, std::span<const LabeledFeatures> rows) {
  for (const auto& [v, g] : rows) {
    nlohmann::ordered_json j;
    j["doc_id"] = v.doc_id;
    j["age_group"] = g ? nlohmann::ordered_json(std::string(to_string(*g))) : nlohmann::ordered_json(nullptr);
    j["word_token_count"] = v.word_token_count;
    for (std::size_t i = 0; i < kMetricCount; ++i)
      j[std::string(kMetricNames[i])] = v.values[i] ? nlohmann::ordered_json(*v.values[i]) : nlohmann::ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

/// A feature table as read from disk. Metric columns are kept in file
/// order; `columns` lets callers check them against what a model expects.
struct FeatureTable {
  std::vector<std::string> columns;
  std::vector<LabeledFeatures> rows;
  // Raw metric values per row in `columns` order (equal to rows[i].features
  // when the columns match the catalog).
  std::vector<std::vector<std::optional<double>>> raw;

  bool matches_catalog() const { return columns == metric_names(); }
};

inline FeatureTable read_features_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error("features file is empty");
  const auto& h = header->fields;
  if (h.size() < 3 || h[0] != "doc_id" || h[1] != "age_group" || h[2] != "word_token_count")
    throw Error("features file must start with doc_id,age_group,word_token_count");
  FeatureTable table;
  table.columns.assign(h.begin() + 3, h.end());
  const bool catalog = table.matches_catalog();
  while (auto row = reader.next()) {
    const auto& f = row->fields;
    if (f.size() != h.size())
      throw Error("features file line " + std::to_string(row->line) + ": expected " + std::to_string(h.size()) +
                  " fields");
    LabeledFeatures lf;
    lf.features.doc_id = f[0];
    if (!f[1].empty()) {
      lf.group = parse_age_group(f[1]);
      if (!lf.group) throw Error("features file line " + std::to_string(row->line) + ": unknown age group '" + f[1] + "'");
    }
    const auto wc = parse_int(f[2]);
    if (!wc || *wc < 0) throw Error("features file line " + std::to_string(row->line) + ": bad word_token_count");
    lf.features.word_token_count = static_cast<std::size_t>(*wc);
    std::vector<std::optional<double>> raw;
    for (std::size_t c = 3; c < f.size(); ++c) {
      if (f[c].empty()) {
        raw.emplace_back();
        continue;
      }
      const auto x = parse_double(f[c]);
      if (!x) throw Error("features file line " + std::to_string(row->line) + ": bad number '" + f[c] + "'");
      raw.emplace_back(*x);
    }
    if (catalog)
      for (std::size_t i = 0; i < kMetricCount; ++i) lf.features.values[i] = raw[i];
    table.rows.push_back(std::move(lf));
    table.raw.push_back(std::move(raw));
  }
  return table;
}

inline FeatureTable read_features_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open features file: " + path);
  return read_features_csv(in);
}

}  // namespace styx
