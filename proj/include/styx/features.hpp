#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "styx/conllu.hpp"
#include "styx/text.hpp"
#include "styx/yngve.hpp"

namespace styx {

/// Fixed metric order. Feature files, aggregation and models all use it.
enum class Metric : int {
  noun_rate,
  verb_rate,
  adjective_rate,
  adverb_rate,
  pronoun_rate,
  conjunction_rate,
  demonstrative_rate,
  possessive_rate,
  noun_verb_ratio,
  noun_ratio,
  pronoun_noun_ratio,
  closed_class_rate,
  open_class_rate,
  content_density,
  idea_density,
  prop_inflected_verbs,
  prop_auxiliary_verbs,
  prop_gerund_verbs,
  prop_participles,
  clauses_per_sentence,
  mean_yngve_depth,
  discourse_marker_rate,
  self_reference_rate,
  unique_words_rate,
};

inline constexpr std::size_t kMetricCount = 24;

inline constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "noun_rate",          "verb_rate",         "adjective_rate",       "adverb_rate",          "pronoun_rate",
    "conjunction_rate",   "demonstrative_rate", "possessive_rate",     "noun_verb_ratio",      "noun_ratio",
    "pronoun_noun_ratio", "closed_class_rate", "open_class_rate",      "content_density",      "idea_density",
    "prop_inflected_verbs", "prop_auxiliary_verbs", "prop_gerund_verbs", "prop_participles",  "clauses_per_sentence",
    "mean_yngve_depth",   "discourse_marker_rate", "self_reference_rate", "unique_words_rate"};

inline constexpr std::string_view to_string(Metric m) { return kMetricNames[static_cast<int>(m)]; }

inline std::optional<Metric> parse_metric(std::string_view s) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i)
    if (kMetricNames[i] == s) return static_cast<Metric>(i);
  return std::nullopt;
}

/// Metrics bounded to [0, 1]. The three open ratios (noun_verb, pronoun_noun,
/// content_density) and the two structural means are only non-negative.
inline constexpr bool is_unit_interval(Metric m) {
  switch (m) {
    case Metric::noun_verb_ratio:
    case Metric::pronoun_noun_ratio:
    case Metric::content_density:
    case Metric::clauses_per_sentence:
    case Metric::mean_yngve_depth:
      return false;
    default:
      return true;
  }
}

/// FNV-1a over the comma-joined metric names; stored in model files so a
/// model never consumes features laid out in a different order.
inline std::uint64_t catalog_hash(const std::vector<std::string>& names) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) h = (h ^ static_cast<unsigned char>(',')) * 0x100000001b3ULL;
    for (unsigned char c : names[i]) h = (h ^ c) * 0x100000001b3ULL;
  }
  return h;
}

inline std::vector<std::string> metric_names() { return {kMetricNames.begin(), kMetricNames.end()}; }

struct FeatureVector {
  std::string doc_id;
  std::size_t word_token_count = 0;
  std::array<std::optional<double>, kMetricCount> values{};

  std::optional<double>& operator[](Metric m) { return values[static_cast<int>(m)]; }
  const std::optional<double>& operator[](Metric m) const { return values[static_cast<int>(m)]; }

  /// Copies every non-null slot of `other` into this vector.
  void merge(const FeatureVector& other) {
    for (std::size_t i = 0; i < kMetricCount; ++i)
      if (other.values[i]) values[i] = other.values[i];
  }

  bool operator==(const FeatureVector&) const = default;
};

/// Word-level counts shared by the POS-derived metrics.
struct PosCounts {
  std::size_t words = 0;
  std::size_t noun = 0, verb = 0, adj = 0, adv = 0, pron = 0, conj = 0, demonstrative = 0, possessive = 0;
  std::size_t open = 0, closed = 0, propositions = 0;
};

namespace detail {

inline bool is_open_class(Upos u) {
  return u == Upos::NOUN || u == Upos::PROPN || u == Upos::VERB || u == Upos::ADJ || u == Upos::ADV || u == Upos::INTJ;
}
inline bool is_closed_class(Upos u) {
  return u == Upos::PRON || u == Upos::DET || u == Upos::ADP || u == Upos::AUX || u == Upos::CCONJ ||
         u == Upos::SCONJ || u == Upos::PART || u == Upos::NUM;
}
inline bool is_proposition(Upos u) {
  return u == Upos::VERB || u == Upos::ADJ || u == Upos::ADV || u == Upos::ADP || u == Upos::CCONJ ||
         u == Upos::SCONJ;
}

inline std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

template <typename F>
void for_each_word(const ParsedDocument& doc, F&& f) {
  for (const Sentence& s : doc.sentences)
    for (const Token& t : s.tokens)
      if (t.upos != Upos::PUNCT) f(t);
}

}  // namespace detail

inline PosCounts count_pos(const ParsedDocument& doc) {
  PosCounts c;
  detail::for_each_word(doc, [&](const Token& t) {
    ++c.words;
    const Upos u = t.upos;
    if (u == Upos::NOUN || u == Upos::PROPN) ++c.noun;
    if (u == Upos::VERB) ++c.verb;
    if (u == Upos::ADJ) ++c.adj;
    if (u == Upos::ADV) ++c.adv;
    if (u == Upos::PRON) ++c.pron;
    if (u == Upos::CCONJ || u == Upos::SCONJ) ++c.conj;
    if ((u == Upos::DET || u == Upos::PRON) &&
        (t.lemma == "this" || t.lemma == "that" || t.lemma == "these" || t.lemma == "those"))
      ++c.demonstrative;
    if (t.xpos == "PRP$" || t.xpos == "POS" || t.xpos == "WP$" || t.has_feat("Poss", "Yes")) ++c.possessive;
    if (detail::is_open_class(u)) ++c.open;
    if (detail::is_closed_class(u)) ++c.closed;
    if (detail::is_proposition(u)) ++c.propositions;
  });
  return c;
}

/// The eight part-of-speech rates over word (non-PUNCT) tokens.
inline FeatureVector compute_pos_rates(const ParsedDocument& doc) {
  const PosCounts c = count_pos(doc);
  FeatureVector v;
  v.doc_id = doc.doc_id;
  v.word_token_count = c.words;
  v[Metric::noun_rate] = detail::ratio(c.noun, c.words);
  v[Metric::verb_rate] = detail::ratio(c.verb, c.words);
  v[Metric::adjective_rate] = detail::ratio(c.adj, c.words);
  v[Metric::adverb_rate] = detail::ratio(c.adv, c.words);
  v[Metric::pronoun_rate] = detail::ratio(c.pron, c.words);
  v[Metric::conjunction_rate] = detail::ratio(c.conj, c.words);
  v[Metric::demonstrative_rate] = detail::ratio(c.demonstrative, c.words);
  v[Metric::possessive_rate] = detail::ratio(c.possessive, c.words);
  return v;
}

inline FeatureVector compute_ratios(const ParsedDocument& doc) {
  const PosCounts c = count_pos(doc);
  FeatureVector v;
  v.doc_id = doc.doc_id;
  v.word_token_count = c.words;
  v[Metric::noun_verb_ratio] = detail::ratio(c.noun, c.verb);
  v[Metric::noun_ratio] = detail::ratio(c.noun, c.noun + c.verb);
  v[Metric::pronoun_noun_ratio] = detail::ratio(c.pron, c.noun);
  return v;
}

inline FeatureVector compute_class_rates(const ParsedDocument& doc) {
  const PosCounts c = count_pos(doc);
  FeatureVector v;
  v.doc_id = doc.doc_id;
  v.word_token_count = c.words;
  v[Metric::closed_class_rate] = detail::ratio(c.closed, c.words);
  v[Metric::open_class_rate] = detail::ratio(c.open, c.words);
  v[Metric::content_density] = detail::ratio(c.open, c.closed);
  return v;
}

inline FeatureVector compute_idea_density(const ParsedDocument& doc) {
  const PosCounts c = count_pos(doc);
  FeatureVector v;
  v.doc_id = doc.doc_id;
  v.word_token_count = c.words;
  v[Metric::idea_density] = detail::ratio(c.propositions, c.words);
  return v;
}

/// Shares of VERB+AUX tokens that are inflected, auxiliary, gerund or
/// participle. Penn xpos decides when present, otherwise UD features.
inline FeatureVector compute_verb_morphology(const ParsedDocument& doc) {
  std::size_t verbs = 0, inflected = 0, aux = 0, gerund = 0, participle = 0;
  detail::for_each_word(doc, [&](const Token& t) {
    if (t.upos != Upos::VERB && t.upos != Upos::AUX) return;
    ++verbs;
    if (t.upos == Upos::AUX) ++aux;
    if (!t.xpos.empty()) {
      const std::string& x = t.xpos;
      if (x == "VBD" || x == "VBZ" || x == "VBG" || x == "VBN") ++inflected;
      if (x == "VBG") ++gerund;
      if (x == "VBN") ++participle;
    } else {
      if (t.has_feat("VerbForm", "Ger")) ++gerund;
      if (t.has_feat("VerbForm", "Part")) ++participle;
      const bool third_sing_present =
          t.has_feat("Tense", "Pres") && t.has_feat("Number", "Sing") && t.has_feat("Person", "3");
      if (third_sing_present || t.has_feat("Tense", "Past")) ++inflected;
    }
  });
  FeatureVector v;
  v.doc_id = doc.doc_id;
  v[Metric::prop_inflected_verbs] = detail::ratio(inflected, verbs);
  v[Metric::prop_auxiliary_verbs] = detail::ratio(aux, verbs);
  v[Metric::prop_gerund_verbs] = detail::ratio(gerund, verbs);
  v[Metric::prop_participles] = detail::ratio(participle, verbs);
  return v;
}

inline bool is_clause_relation(std::string_view base) {
  return base == "root" || base == "csubj" || base == "ccomp" || base == "xcomp" || base == "advcl" || base == "acl";
}

/// Mean clause count per sentence; null without dependency trees.
inline FeatureVector compute_clauses(const ParsedDocument& doc) {
  FeatureVector v;
  v.doc_id = doc.doc_id;
  if (!doc.has_trees || doc.sentences.empty()) return v;
  std::size_t clauses = 0;
  for (const Sentence& s : doc.sentences)
    for (const Token& t : s.tokens)
      if (is_clause_relation(t.base_deprel())) ++clauses;
  v[Metric::clauses_per_sentence] = static_cast<double>(clauses) / static_cast<double>(doc.sentences.size());
  return v;
}

/// Mean over sentences of the mean word Yngve depth; null without trees or
/// when every sentence is punctuation only.
inline FeatureVector compute_yngve(const ParsedDocument& doc) {
  FeatureVector v;
  v.doc_id = doc.doc_id;
  if (!doc.has_trees) return v;
  double total = 0;
  std::size_t counted = 0;
  for (const Sentence& s : doc.sentences) {
    if (const auto m = sentence_yngve(s)) {
      total += *m;
      ++counted;
    }
  }
  if (counted) v[Metric::mean_yngve_depth] = total / static_cast<double>(counted);
  return v;
}

/// Discourse-marker list. Entries with a space are two-word markers.
class MarkerLexicon {
 public:
  MarkerLexicon() : MarkerLexicon(default_markers()) {}

  explicit MarkerLexicon(const std::vector<std::string>& markers) {
    for (const auto& m : markers) {
      const auto sp = m.find(' ');
      if (sp == std::string::npos)
        single_.insert(to_lower(m));
      else
        pairs_.insert(to_lower(trim(m.substr(0, sp))) + ' ' + to_lower(trim(m.substr(sp + 1))));
    }
  }

  static MarkerLexicon load(const std::string& path) { return MarkerLexicon(read_word_list(path)); }

  static const std::vector<std::string>& default_markers() {
    static const std::vector<std::string> markers = {
        "well",     "so",          "anyway",       "however",   "therefore", "actually",
        "basically", "besides",    "moreover",     "furthermore", "nevertheless", "meanwhile",
        "otherwise", "thus",       "hence",        "okay",      "you know",  "i mean"};
    return markers;
  }

  /// Matches in a sequence of lowercase word forms. Two-word markers are
  /// tried first and consume both words.
  std::size_t count(const std::vector<std::string>& words) const {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < words.size();) {
      if (i + 1 < words.size() && pairs_.contains(words[i] + ' ' + words[i + 1])) {
        ++hits;
        i += 2;
      } else {
        if (single_.contains(words[i])) ++hits;
        ++i;
      }
    }
    return hits;
  }

 private:
  std::unordered_set<std::string> single_;
  std::unordered_set<std::string> pairs_;
};

/// Discourse markers, first-person self references and type-token ratio.
/// Marker pairs are matched within a sentence over its word tokens.
inline FeatureVector compute_lexical(const ParsedDocument& doc, const MarkerLexicon& markers) {
  static const std::unordered_set<std::string_view> self = {"i", "me", "my", "mine", "myself"};
  FeatureVector v;
  v.doc_id = doc.doc_id;
  std::size_t words = 0, self_refs = 0, marker_hits = 0;
  std::unordered_set<std::string> distinct;
  std::vector<std::string> sentence_words;
  for (const Sentence& s : doc.sentences) {
    sentence_words.clear();
    for (const Token& t : s.tokens) {
      if (t.upos == Upos::PUNCT) continue;
      ++words;
      std::string lower = to_lower(t.form);
      if (self.contains(lower)) ++self_refs;
      distinct.insert(lower);
      sentence_words.push_back(std::move(lower));
    }
    marker_hits += markers.count(sentence_words);
  }
  v.word_token_count = words;
  v[Metric::discourse_marker_rate] = detail::ratio(marker_hits, words);
  v[Metric::self_reference_rate] = detail::ratio(self_refs, words);
  v[Metric::unique_words_rate] = detail::ratio(distinct.size(), words);
  return v;
}

/// All metrics for one document in catalog order. Pure and deterministic.
inline FeatureVector featurize(const ParsedDocument& doc, const MarkerLexicon& markers) {
  FeatureVector v = compute_pos_rates(doc);
  v.merge(compute_ratios(doc));
  v.merge(compute_class_rates(doc));
  v.merge(compute_idea_density(doc));
  v.merge(compute_verb_morphology(doc));
  v.merge(compute_clauses(doc));
  v.merge(compute_yngve(doc));
  v.merge(compute_lexical(doc, markers));
  return v;
}

inline FeatureVector featurize(const ParsedDocument& doc) {
  static const MarkerLexicon markers;
  return featurize(doc, markers);
}

}  // namespace styx
