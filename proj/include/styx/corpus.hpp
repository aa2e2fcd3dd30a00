#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "styx/csv.hpp"
#include "styx/error.hpp"
#include "styx/random.hpp"
#include "styx/text.hpp"

namespace styx {

enum class AgeGroup : int { Young = 0, MiddleAged = 1, Old = 2 };

inline constexpr std::array<AgeGroup, 3> kAgeGroups = {AgeGroup::Young, AgeGroup::MiddleAged, AgeGroup::Old};

inline constexpr std::string_view to_string(AgeGroup g) {
  switch (g) {
    case AgeGroup::Young: return "Young";
    case AgeGroup::MiddleAged: return "MiddleAged";
    case AgeGroup::Old: return "Old";
  }
  return "?";
}

inline std::optional<AgeGroup> parse_age_group(std::string_view s) {
  for (AgeGroup g : kAgeGroups)
    if (to_string(g) == s) return g;
  return std::nullopt;
}

/// Young = [18, 34], MiddleAged = [35, 41], Old = [42, inf). Under 18 has no group.
inline std::optional<AgeGroup> derive_age_group(long long age) {
  if (age < 0) throw Error("negative age: " + std::to_string(age));
  if (age < 18) return std::nullopt;
  if (age <= 34) return AgeGroup::Young;
  if (age <= 41) return AgeGroup::MiddleAged;
  return AgeGroup::Old;
}

struct BlogRecord {
  std::string author_id;
  std::optional<std::string> gender;
  int age = 0;
  std::optional<std::string> topic;
  std::optional<std::string> sign;
  std::optional<std::string> date;
  std::string text;
  // Stable per-row id; taken from the `doc_id` column when present,
  // otherwise "row-<n>" with n the 1-based data row ordinal.
  std::string doc_id;
  std::size_t source_line = 0;  // physical line where the row starts

  bool operator==(const BlogRecord&) const = default;
};

/// Source column name for each record field. Optional fields may be left
/// empty to mean "not present in this file".
struct ColumnMapping {
  std::string author_id = "id";
  std::string gender = "gender";
  std::string age = "age";
  std::string topic = "topic";
  std::string sign = "sign";
  std::string date = "date";
  std::string text = "text";
  std::string doc_id = "doc_id";
};

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct CorpusReadResult {
  std::vector<BlogRecord> records;
  std::vector<RejectedRow> rejects;
  std::size_t rows_in = 0;
};

namespace detail {

inline std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name) {
  if (name.empty()) return std::nullopt;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == name) return i;
  return std::nullopt;
}

}  // namespace detail

inline CorpusReadResult read_corpus_csv(std::istream& in, const ColumnMapping& schema = {}) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error("corpus CSV has no header row");
  // Strip a UTF-8 byte order mark from the first column name.
  if (!header->fields.empty() && starts_with(header->fields[0], "\xEF\xBB\xBF")) header->fields[0].erase(0, 3);
  const auto& cols = header->fields;

  const auto required = [&](const std::string& name) {
    auto idx = detail::find_column(cols, name);
    if (!idx) throw Error("corpus CSV is missing mapped column '" + name + "'");
    return *idx;
  };
  const std::size_t c_author = required(schema.author_id);
  const std::size_t c_age = required(schema.age);
  const std::size_t c_text = required(schema.text);
  const auto c_gender = detail::find_column(cols, schema.gender);
  const auto c_topic = detail::find_column(cols, schema.topic);
  const auto c_sign = detail::find_column(cols, schema.sign);
  const auto c_date = detail::find_column(cols, schema.date);
  const auto c_doc = detail::find_column(cols, schema.doc_id);

  CorpusReadResult result;
  while (auto row = reader.next()) {
    ++result.rows_in;
    auto& f = row->fields;
    if (f.size() != cols.size()) {
      result.rejects.push_back({row->line, "expected " + std::to_string(cols.size()) + " fields, got " +
                                               std::to_string(f.size())});
      continue;
    }
    const auto age = parse_int(f[c_age]);
    if (!age || *age > 1000) {
      result.rejects.push_back({row->line, "unparseable age"});
      continue;
    }
    if (*age < 0) {
      result.rejects.push_back({row->line, "negative age"});
      continue;
    }
    BlogRecord r;
    r.author_id = f[c_author];
    r.age = static_cast<int>(*age);
    r.text = std::string(trim(f[c_text]));
    const auto opt = [&](const std::optional<std::size_t>& c) -> std::optional<std::string> {
      if (!c) return std::nullopt;
      return f[*c];
    };
    r.gender = opt(c_gender);
    r.topic = opt(c_topic);
    r.sign = opt(c_sign);
    r.date = opt(c_date);
    r.source_line = row->line;
    r.doc_id = c_doc && !f[*c_doc].empty() ? f[*c_doc] : "row-" + std::to_string(result.rows_in);
    result.records.push_back(std::move(r));
  }
  return result;
}

inline CorpusReadResult read_corpus_csv(const std::string& path, const ColumnMapping& schema = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file: " + path);
  return read_corpus_csv(in, schema);
}

inline void write_reject_report(std::ostream& out, std::span<const RejectedRow> rejects) {
  csv::write_row(out, {"line_number", "reason"});
  for (const auto& r : rejects) csv::write_row(out, {std::to_string(r.line), r.reason});
}

struct GroupedRecord {
  BlogRecord record;
  AgeGroup group;

  bool operator==(const GroupedRecord&) const = default;
};

struct BalancedCorpus {
  std::vector<GroupedRecord> records;
  std::uint64_t seed = 0;
  std::size_t per_group_count = 0;
};

/// Downsamples every group to the size of the smallest one. Each group is
/// shuffled with one generator seeded once (groups visited Young, MiddleAged,
/// Old), then its prefix is kept. Output is ordered by group, then by
/// post-shuffle position.
inline BalancedCorpus balance(std::span<const GroupedRecord> records, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 3> members;
  for (std::size_t i = 0; i < records.size(); ++i) members[static_cast<int>(records[i].group)].push_back(i);

  std::string empty;
  for (AgeGroup g : kAgeGroups)
    if (members[static_cast<int>(g)].empty()) empty += (empty.empty() ? "" : ", ") + std::string(to_string(g));
  if (!empty.empty()) throw Error("empty groups: " + empty);

  std::size_t per_group = records.size();
  for (const auto& m : members) per_group = std::min(per_group, m.size());

  BalancedCorpus out;
  out.seed = seed;
  out.per_group_count = per_group;
  out.records.reserve(per_group * 3);
  Rng rng(seed);
  for (auto& m : members) {
    rng.shuffle(std::span<std::size_t>(m));
    for (std::size_t i = 0; i < per_group; ++i) out.records.push_back(records[m[i]]);
  }
  return out;
}

inline const std::vector<std::string>& balanced_csv_header() {
  static const std::vector<std::string> header = {"doc_id", "id",   "gender", "age", "age_group",
                                                  "topic",  "sign", "date",   "text"};
  return header;
}

/// Writes grouped records in the layout `ingest` produces. The file is
/// readable by read_corpus_csv with the default mapping.
inline void write_balanced_csv(std::ostream& out, std::span<const GroupedRecord> records) {
  csv::write_row(out, balanced_csv_header());
  for (const auto& [r, g] : records) {
    csv::write_row(out, {r.doc_id, r.author_id, r.gender.value_or(""), std::to_string(r.age), std::string(to_string(g)),
                         r.topic.value_or(""), r.sign.value_or(""), r.date.value_or(""), r.text});
  }
}

}  // namespace styx
