#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "styx/corpus.hpp"
#include "styx/csv.hpp"
#include "styx/features.hpp"
#include "styx/features_io.hpp"

namespace styx {

struct MetricStats {
  std::optional<double> mean;
  std::optional<double> variance;  // sample (n - 1); null when fewer than 2 values
  std::size_t non_null_count = 0;
};

struct GroupSummary {
  AgeGroup group = AgeGroup::Young;
  std::size_t document_count = 0;
  std::array<MetricStats, kMetricCount> metrics{};

  MetricStats& operator[](Metric m) { return metrics[static_cast<int>(m)]; }
  const MetricStats& operator[](Metric m) const { return metrics[static_cast<int>(m)]; }
};

/// Per group and metric mean and sample variance over non-null values.
/// Groups appear in Young, MiddleAged, Old order, only when they have at
/// least one document. Sums are taken in a fixed order after sorting each
/// column so the result does not depend on input order.
inline std::vector<GroupSummary> aggregate(std::span<const LabeledFeatures> vectors) {
  std::array<std::vector<const FeatureVector*>, 3> by_group;
  for (const auto& lf : vectors)
    if (lf.group) by_group[static_cast<int>(*lf.group)].push_back(&lf.features);

  std::vector<GroupSummary> out;
  std::vector<double> column;
  for (AgeGroup g : kAgeGroups) {
    const auto& members = by_group[static_cast<int>(g)];
    if (members.empty()) continue;
    GroupSummary s;
    s.group = g;
    s.document_count = members.size();
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      column.clear();
      for (const FeatureVector* v : members)
        if (v->values[m]) column.push_back(*v->values[m]);
      MetricStats& st = s.metrics[m];
      st.non_null_count = column.size();
      if (column.empty()) continue;
      std::sort(column.begin(), column.end());
      double sum = 0;
      for (double x : column) sum += x;
      const double mean = sum / static_cast<double>(column.size());
      st.mean = mean;
      if (column.size() >= 2) {
        double ss = 0;
        for (double x : column) ss += (x - mean) * (x - mean);
        st.variance = ss / static_cast<double>(column.size() - 1);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct ComparisonColumn {
  std::string corpus;
  AgeGroup group;
};

struct ComparisonCell {
  std::optional<double> raw;
  std::optional<double> normalized;
};

/// Metrics by (corpus, group) columns with per-row min-max normalization.
struct ComparisonTable {
  std::vector<Metric> rows;
  std::vector<ComparisonColumn> columns;
  std::vector<std::vector<ComparisonCell>> cells;  // [row][column]
};

/// Min-max scales the non-null entries of one row into [0, 1]. A row whose
/// non-null entries are all equal maps to 0.5.
inline std::vector<std::optional<double>> normalize_row(std::span<const std::optional<double>> row) {
  std::optional<double> lo, hi;
  for (const auto& x : row)
    if (x) {
      lo = lo ? std::min(*lo, *x) : *x;
      hi = hi ? std::max(*hi, *x) : *x;
    }
  std::vector<std::optional<double>> out(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!row[i]) continue;
    out[i] = *hi == *lo ? 0.5 : (*row[i] - *lo) / (*hi - *lo);
  }
  return out;
}

inline ComparisonTable compare(std::span<const GroupSummary> a, const std::string& label_a,
                               std::span<const GroupSummary> b, const std::string& label_b,
                               std::span<const std::string> metrics) {
  std::vector<AgeGroup> groups_a, groups_b;
  for (const auto& s : a) groups_a.push_back(s.group);
  for (const auto& s : b) groups_b.push_back(s.group);
  if (groups_a != groups_b) throw Error("corpora '" + label_a + "' and '" + label_b + "' cover different age groups");
  if (groups_a.empty()) throw Error("no age groups to compare");

  ComparisonTable t;
  for (const auto& name : metrics) {
    const auto m = parse_metric(name);
    if (!m) throw Error("metric '" + name + "' is not in the summaries");
    t.rows.push_back(*m);
  }
  for (const auto& s : a) t.columns.push_back({label_a, s.group});
  for (const auto& s : b) t.columns.push_back({label_b, s.group});

  for (Metric m : t.rows) {
    std::vector<std::optional<double>> raw;
    for (const auto& s : a) raw.push_back(s[m].mean);
    for (const auto& s : b) raw.push_back(s[m].mean);
    const auto norm = normalize_row(raw);
    std::vector<ComparisonCell> row;
    for (std::size_t i = 0; i < raw.size(); ++i) row.push_back({raw[i], norm[i]});
    t.cells.push_back(std::move(row));
  }
  return t;
}

namespace detail {
inline std::string opt_num(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }
inline nlohmann::ordered_json opt_json(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}
inline std::string column_label(const ComparisonColumn& c) { return c.corpus + ":" + std::string(to_string(c.group)); }
}  // namespace detail

/// Long-format CSV: metric, corpus, age_group, raw_mean, normalized.
inline void write_comparison_csv(std::ostream& out, const ComparisonTable& t) {
  csv::write_row(out, {"metric", "corpus", "age_group", "raw_mean", "normalized"});
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      csv::write_row(out, {std::string(to_string(t.rows[r])), t.columns[c].corpus, std::string(to_string(t.columns[c].group)),
                           detail::opt_num(t.cells[r][c].raw), detail::opt_num(t.cells[r][c].normalized)});
}

inline nlohmann::ordered_json comparison_json(const ComparisonTable& t) {
  nlohmann::ordered_json j;
  j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : t.columns) j["columns"].push_back({{"corpus", c.corpus}, {"age_group", std::string(to_string(c.group))}});
  j["rows"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    nlohmann::ordered_json row;
    row["metric"] = std::string(to_string(t.rows[r]));
    row["raw"] = nlohmann::ordered_json::array();
    row["normalized"] = nlohmann::ordered_json::array();
    for (const auto& cell : t.cells[r]) {
      row["raw"].push_back(detail::opt_json(cell.raw));
      row["normalized"].push_back(detail::opt_json(cell.normalized));
    }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

/// Grayscale heatmap, darker = higher normalized value.
inline void write_comparison_svg(std::ostream& out, const ComparisonTable& t) {
  constexpr int cell_w = 110, cell_h = 22, label_w = 190, header_h = 40;
  const int width = label_w + cell_w * static_cast<int>(t.columns.size());
  const int height = header_h + cell_h * static_cast<int>(t.rows.size());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << "<text x=\"" << label_w + cell_w * static_cast<int>(c) + 4 << "\" y=\"" << header_h - 8 << "\">"
        << detail::column_label(t.columns[c]) << "</text>\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int y = header_h + cell_h * static_cast<int>(r);
    out << "<text x=\"4\" y=\"" << y + 15 << "\">" << to_string(t.rows[r]) << "</text>\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& n = t.cells[r][c].normalized;
      const int shade = n ? static_cast<int>(std::lround(255.0 * (1.0 - *n))) : 255;
      out << "<rect x=\"" << label_w + cell_w * static_cast<int>(c) << "\" y=\"" << y << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"rgb(" << shade << ',' << shade << ',' << shade
          << ")\" stroke=\"#999\"/>\n";
    }
  }
  out << "</svg>\n";
}

struct VarianceRow {
  AgeGroup group;
  std::optional<double> mean;
  std::optional<double> sd;
  std::optional<double> ratio;  // sd / mean, the error bar's height relative to the bar
  bool flagged = false;         // fewer than two values, or zero mean with non-zero sd
};

inline std::vector<VarianceRow> variance_report(std::span<const GroupSummary> summaries, Metric metric) {
  std::vector<VarianceRow> out;
  for (const auto& s : summaries) {
    const MetricStats& st = s[metric];
    VarianceRow row{s.group, st.mean, std::nullopt, std::nullopt, false};
    if (!st.variance) {
      row.flagged = true;
    } else {
      row.sd = std::sqrt(*st.variance);
      if (*row.sd == 0.0)
        row.ratio = 0.0;
      else if (st.mean && *st.mean != 0.0)
        row.ratio = *row.sd / std::abs(*st.mean);
      else
        row.flagged = true;
    }
    out.push_back(row);
  }
  return out;
}

inline void write_variance_csv(std::ostream& out, Metric metric, std::span<const VarianceRow> rows) {
  for (const auto& r : rows)
    csv::write_row(out, {std::string(to_string(metric)), std::string(to_string(r.group)), detail::opt_num(r.mean),
                         detail::opt_num(r.sd), detail::opt_num(r.ratio), r.flagged ? "1" : "0"});
}

using RankedForms = std::vector<std::pair<std::string, std::size_t>>;

/// Top-k lowercase word forms per group, stopwords removed, ranked by count
/// descending then form ascending. Groups without documents are absent.
inline std::map<AgeGroup, RankedForms> token_frequency(std::span<const std::pair<ParsedDocument, AgeGroup>> docs,
                                                       std::size_t top_k,
                                                       const std::unordered_set<std::string>& stopwords) {
  if (top_k < 1) throw Error("top_k must be at least 1");
  std::map<AgeGroup, std::unordered_map<std::string, std::size_t>> counts;
  for (const auto& [doc, g] : docs) {
    auto& c = counts[g];
    for (const Sentence& s : doc.sentences)
      for (const Token& t : s.tokens) {
        if (t.upos == Upos::PUNCT) continue;
        std::string lower = to_lower(t.form);
        if (stopwords.contains(lower)) continue;
        ++c[std::move(lower)];
      }
  }
  std::map<AgeGroup, RankedForms> out;
  for (auto& [g, c] : counts) {
    RankedForms ranked(c.begin(), c.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    out.emplace(g, std::move(ranked));
  }
  return out;
}

}  // namespace styx
