#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <sstream>

#include "styx/conllu.hpp"
#include "styx/features.hpp"
#include "styx/features_io.hpp"
#include "support/build_doc.hpp"
#include "support/datasets.hpp"
#include "support/yngve_oracle.hpp"

using namespace styx;
using fixtures::flat_doc;
using M = Metric;

namespace {

ParsedDocument load_doc(const std::string& file, const std::string& id) {
  std::ifstream in(std::string(STYX_FIXTURES) + "/" + file);
  for (auto& d : read_conllu(in))
    if (d.doc_id == id) return d;
  throw std::runtime_error("no doc " + id);
}

void expect_value(const FeatureVector& v, Metric m, double expected) {
  ASSERT_TRUE(v[m].has_value()) << to_string(m);
  EXPECT_NEAR(*v[m], expected, 1e-12) << to_string(m);
}

ParsedDocument i_love_pictures() {
  return flat_doc({{"I", "PRON", "PRP"}, {"love", "VERB", "VBP"}, {"pictures", "NOUN", "NNS"}, {".", "PUNCT", "."}});
}

}  // namespace

TEST(PosRates, ILovePictures) {
  const auto v = compute_pos_rates(i_love_pictures());
  expect_value(v, M::noun_rate, 1.0 / 3);
  expect_value(v, M::verb_rate, 1.0 / 3);
  expect_value(v, M::pronoun_rate, 1.0 / 3);
  for (M m : {M::adjective_rate, M::adverb_rate, M::conjunction_rate, M::demonstrative_rate, M::possessive_rate})
    expect_value(v, m, 0.0);
}

TEST(PosRates, EmptyDocumentIsNull) {
  const auto v = compute_pos_rates(ParsedDocument{});
  for (std::size_t i = 0; i < 8; ++i) EXPECT_FALSE(v.values[i].has_value());
}

TEST(PosRates, Demonstratives) {
  const auto v = compute_pos_rates(flat_doc({{"these", "DET", "DT"}, {"those", "DET", "DT"}}));
  expect_value(v, M::demonstrative_rate, 1.0);
}

TEST(PosRates, DemonstrativeNeedsDetOrPron) {
  // "that" as a subordinator is not a demonstrative.
  const auto v = compute_pos_rates(flat_doc({{"that", "SCONJ", "IN"}, {"this", "PRON", "DT"}}));
  expect_value(v, M::demonstrative_rate, 0.5);
}

TEST(PosRates, PossessivesByXposOrFeature) {
  auto doc = flat_doc({{"my", "PRON", "PRP$"}, {"John", "PROPN", "NNP"}, {"'s", "PART", "POS"}, {"her", "PRON"}});
  doc.sentences[0].tokens[3].feats = {{"Poss", "Yes"}};
  expect_value(compute_pos_rates(doc), M::possessive_rate, 3.0 / 4);
}

TEST(Ratios, ILovePictures) {
  const auto v = compute_ratios(i_love_pictures());
  expect_value(v, M::noun_verb_ratio, 1.0);
  expect_value(v, M::noun_ratio, 0.5);
  expect_value(v, M::pronoun_noun_ratio, 1.0);
}

TEST(Ratios, NoVerbs) {
  const auto v = compute_ratios(flat_doc({{"dogs", "NOUN"}, {"cats", "NOUN"}}));
  EXPECT_FALSE(v[M::noun_verb_ratio].has_value());
  expect_value(v, M::noun_ratio, 1.0);
}

TEST(Ratios, NoNounsNoVerbs) {
  const auto v = compute_ratios(flat_doc({{"wow", "INTJ"}}));
  EXPECT_FALSE(v[M::noun_verb_ratio].has_value());
  EXPECT_FALSE(v[M::noun_ratio].has_value());
  EXPECT_FALSE(v[M::pronoun_noun_ratio].has_value());
}

TEST(ClassRates, ILovePictures) {
  const auto v = compute_class_rates(i_love_pictures());
  expect_value(v, M::open_class_rate, 2.0 / 3);
  expect_value(v, M::closed_class_rate, 1.0 / 3);
  expect_value(v, M::content_density, 2.0);
}

TEST(ClassRates, AllInterjections) {
  const auto v = compute_class_rates(flat_doc({{"wow", "INTJ"}, {"wow", "INTJ"}}));
  expect_value(v, M::open_class_rate, 1.0);
  expect_value(v, M::closed_class_rate, 0.0);
  EXPECT_FALSE(v[M::content_density].has_value());
}

TEST(ClassRates, SymAndXAreInNeitherClass) {
  const auto v = compute_class_rates(flat_doc({{"$", "SYM"}, {"dog", "NOUN"}, {"the", "DET"}, {"xyz", "X"}}));
  EXPECT_LE(*v[M::open_class_rate] + *v[M::closed_class_rate], 1.0);
  expect_value(v, M::open_class_rate, 0.25);
  expect_value(v, M::closed_class_rate, 0.25);
}

TEST(IdeaDensity, Examples) {
  expect_value(compute_idea_density(i_love_pictures()), M::idea_density, 1.0 / 3);
  expect_value(compute_idea_density(flat_doc({{"old", "ADJ"},
                                              {"men", "NOUN"},
                                              {"and", "CCONJ"},
                                              {"old", "ADJ"},
                                              {"women", "NOUN"},
                                              {"run", "VERB"}})),
               M::idea_density, 4.0 / 6);
  expect_value(compute_idea_density(flat_doc({{"dog", "NOUN"}, {"cat", "NOUN"}})), M::idea_density, 0.0);
}

TEST(VerbMorphology, SheIsRunning) {
  const auto v = compute_verb_morphology(flat_doc({{"She", "PRON", "PRP"}, {"is", "AUX", "VBZ"}, {"running", "VERB", "VBG"}}));
  expect_value(v, M::prop_inflected_verbs, 1.0);
  expect_value(v, M::prop_auxiliary_verbs, 0.5);
  expect_value(v, M::prop_gerund_verbs, 0.5);
  expect_value(v, M::prop_participles, 0.0);
}

TEST(VerbMorphology, BaseForm) {
  const auto v = compute_verb_morphology(flat_doc({{"Go", "VERB", "VB"}}));
  for (M m : {M::prop_inflected_verbs, M::prop_auxiliary_verbs, M::prop_gerund_verbs, M::prop_participles})
    expect_value(v, m, 0.0);
}

TEST(VerbMorphology, NoVerbsIsNull) {
  const auto v = compute_verb_morphology(flat_doc({{"dog", "NOUN"}}));
  for (M m : {M::prop_inflected_verbs, M::prop_auxiliary_verbs, M::prop_gerund_verbs, M::prop_participles})
    EXPECT_FALSE(v[m].has_value());
}

TEST(VerbMorphology, FeatsFallbackWithoutXpos) {
  auto doc = flat_doc({{"runs", "VERB"}, {"running", "VERB"}, {"eaten", "VERB"}, {"ran", "VERB"}});
  auto& t = doc.sentences[0].tokens;
  t[0].feats = {{"Number", "Sing"}, {"Person", "3"}, {"Tense", "Pres"}};
  t[1].feats = {{"VerbForm", "Ger"}};
  t[2].feats = {{"VerbForm", "Part"}};
  t[3].feats = {{"Tense", "Past"}};
  const auto v = compute_verb_morphology(doc);
  expect_value(v, M::prop_inflected_verbs, 0.5);
  expect_value(v, M::prop_gerund_verbs, 0.25);
  expect_value(v, M::prop_participles, 0.25);
}

TEST(Clauses, SheSaidThatHeLeft) {
  expect_value(compute_clauses(load_doc("hand_sentences.conllu", "she-said")), M::clauses_per_sentence, 2.0);
}

TEST(Clauses, SingleTokenRoot) {
  expect_value(compute_clauses(flat_doc({{"Hello", "INTJ"}}, true)), M::clauses_per_sentence, 1.0);
}

TEST(Clauses, NullWithoutTrees) { EXPECT_FALSE(compute_clauses(i_love_pictures())[M::clauses_per_sentence]); }

TEST(Clauses, SubtypesCount) {
  const auto doc = load_doc("age_examples.conllu", "old");  // contains acl:relcl twice
  expect_value(compute_clauses(doc), M::clauses_per_sentence, 8.0);
}

TEST(Yngve, ILovePictures) {
  expect_value(compute_yngve(load_doc("hand_sentences.conllu", "i-love")), M::mean_yngve_depth, 1.0);
}

TEST(Yngve, SheSaidThatHeLeft) {
  const auto doc = load_doc("hand_sentences.conllu", "she-said");
  EXPECT_EQ(yngve_depths(doc.sentences[0]), (std::vector<int>{2, 1, 2, 1, 0}));
  expect_value(compute_yngve(doc), M::mean_yngve_depth, 1.2);
}

TEST(Yngve, SingleWord) { expect_value(compute_yngve(flat_doc({{"Hello", "INTJ"}}, true)), M::mean_yngve_depth, 0.0); }

TEST(Yngve, NullWithoutTrees) { EXPECT_FALSE(compute_yngve(i_love_pictures())[M::mean_yngve_depth]); }

TEST(Yngve, PunctOnlySentencesAreSkipped) {
  auto doc = load_doc("hand_sentences.conllu", "i-love");
  Sentence dots;
  Token t;
  t.index = 1;
  t.form = "...";
  t.upos = Upos::PUNCT;
  t.deprel = "punct";
  dots.tokens.push_back(t);
  doc.sentences.push_back(dots);
  expect_value(compute_yngve(doc), M::mean_yngve_depth, 1.0);
}

TEST(Lexical, SelfReferenceAndUnique) {
  const auto v = compute_lexical(flat_doc({{"I", "PRON"}, {"love", "VERB"}, {"my", "PRON"}, {"dog", "NOUN"}}), MarkerLexicon());
  expect_value(v, M::self_reference_rate, 2.0 / 4);
  expect_value(v, M::unique_words_rate, 1.0);
}

TEST(Lexical, RepeatedMarker) {
  const auto v = compute_lexical(flat_doc({{"so", "ADV"}, {"so", "ADV"}, {"so", "ADV"}}), MarkerLexicon());
  expect_value(v, M::discourse_marker_rate, 1.0);
  expect_value(v, M::unique_words_rate, 1.0 / 3);
}

TEST(Lexical, EmptyIsNull) {
  const auto v = compute_lexical(ParsedDocument{}, MarkerLexicon());
  EXPECT_FALSE(v[M::discourse_marker_rate]);
  EXPECT_FALSE(v[M::self_reference_rate]);
  EXPECT_FALSE(v[M::unique_words_rate]);
}

TEST(Lexical, TwoWordMarkersConsumeBothTokens) {
  // "you know" is one match; "i mean" is another; "well" a third.
  const auto v = compute_lexical(
      flat_doc({{"you", "PRON"}, {"know", "VERB"}, {",", "PUNCT"}, {"I", "PRON"}, {"mean", "VERB"}, {"well", "ADV"}}),
      MarkerLexicon());
  expect_value(v, M::discourse_marker_rate, 3.0 / 5);
}

TEST(Lexical, CustomLexicon) {
  const MarkerLexicon markers(std::vector<std::string>{"indeed", "of course"});
  const auto v = compute_lexical(flat_doc({{"indeed", "ADV"}, {"of", "ADP"}, {"course", "NOUN"}, {"so", "ADV"}}), markers);
  expect_value(v, M::discourse_marker_rate, 2.0 / 4);
}

TEST(Featurize, ILovePicturesWithoutTrees) {
  const auto v = featurize(i_love_pictures());
  EXPECT_EQ(v.word_token_count, 3u);
  expect_value(v, M::noun_rate, 1.0 / 3);
  expect_value(v, M::content_density, 2.0);
  EXPECT_FALSE(v[M::clauses_per_sentence]);
  EXPECT_FALSE(v[M::mean_yngve_depth]);
}

TEST(Featurize, EmptyDocumentAllNull) {
  const auto v = featurize(ParsedDocument{});
  EXPECT_EQ(v.word_token_count, 0u);
  for (const auto& x : v.values) EXPECT_FALSE(x.has_value());
}

TEST(Featurize, Deterministic) {
  const auto doc = load_doc("age_examples.conllu", "old");
  EXPECT_EQ(featurize(doc), featurize(doc));
}

// Values frozen by tests/oracles/metric_oracle.py.
TEST(Featurize, MatchesOracleGoldens) {
  for (const std::string stem : {"age_examples", "hand_sentences"}) {
    std::ifstream golden_in(std::string(STYX_FIXTURES) + "/" + stem + ".features.csv");
    const auto golden = read_features_csv(golden_in);
    ASSERT_TRUE(golden.matches_catalog());
    std::ifstream parses(std::string(STYX_FIXTURES) + "/" + stem + ".conllu");
    const auto docs = read_conllu(parses);
    ASSERT_EQ(docs.size(), golden.rows.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto v = featurize(docs[d]);
      const auto& g = golden.rows[d].features;
      EXPECT_EQ(v.doc_id, g.doc_id);
      EXPECT_EQ(v.word_token_count, g.word_token_count);
      for (std::size_t m = 0; m < kMetricCount; ++m) {
        ASSERT_EQ(v.values[m].has_value(), g.values[m].has_value()) << g.doc_id << " " << kMetricNames[m];
        if (g.values[m]) {
          EXPECT_NEAR(*v.values[m], *g.values[m], 1e-12) << g.doc_id << " " << kMetricNames[m];
        }
      }
    }
  }
}

TEST(Featurize, OldExampleIsDeeperThanYoung) {
  const auto young = featurize(load_doc("age_examples.conllu", "young"));
  const auto old = featurize(load_doc("age_examples.conllu", "old"));
  EXPECT_GT(*old[M::mean_yngve_depth], *young[M::mean_yngve_depth]);
  EXPECT_GT(*old[M::clauses_per_sentence], *young[M::clauses_per_sentence]);
}

TEST(FeatureProperties, RandomDocuments) {
  styx::Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto doc = fixtures::random_document(1 + rng.below(4), 14, rng);
    const auto v = featurize(doc);
    std::size_t words = 0, symx = 0;
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) {
        words += t.upos != Upos::PUNCT;
        symx += t.upos == Upos::SYM || t.upos == Upos::X;
      }
    ASSERT_EQ(v.word_token_count, words);
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      if (!v.values[m]) continue;
      const double x = *v.values[m];
      ASSERT_TRUE(std::isfinite(x)) << kMetricNames[m];
      ASSERT_GE(x, 0.0) << kMetricNames[m];
      if (is_unit_interval(static_cast<Metric>(m))) {
        ASSERT_LE(x, 1.0) << kMetricNames[m];
      }
    }
    if (words > 0) {
      // open + closed + SYM/X = 1 exactly over word tokens (same denominator).
      const double other = static_cast<double>(symx) / static_cast<double>(words);
      EXPECT_NEAR(*v[M::open_class_rate] + *v[M::closed_class_rate] + other, 1.0, 1e-15);
      ASSERT_TRUE(v[M::noun_ratio].has_value() || !v[M::noun_verb_ratio].has_value());
    }
  }
}

TEST(FeatureProperties, YngveZeroIffRightSpine) {
  // Right spine: no node of the projected tree has a child left of its last.
  std::function<bool(const oracle::Node&)> spine = [&](const oracle::Node& n) {
    if (n.children.size() > 1) return false;
    return n.children.empty() || spine(*n.children.back());
  };
  styx::Rng rng(77);
  int zero = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto doc = fixtures::random_document(1 + rng.below(2), 1 + rng.below(4), rng);
    bool all_spine = true;
    for (const auto& s : doc.sentences)
      for (const auto& tree : oracle::project(s)) all_spine &= spine(*tree);
    const auto v = compute_yngve(doc)[M::mean_yngve_depth];
    if (!v) continue;  // every sentence was punctuation
    EXPECT_EQ(*v == 0.0, all_spine);
    zero += all_spine;
  }
  EXPECT_GT(zero, 0);
}

TEST(FeatureProperties, UniqueWordsUnderDuplication) {
  auto doc = flat_doc({{"a", "NOUN"}, {"b", "NOUN"}, {"c", "NOUN"}, {"d", "NOUN"}});
  double prev = *featurize(doc)[M::unique_words_rate];
  EXPECT_EQ(prev, 1.0);
  for (int i = 0; i < 6; ++i) {
    auto t = doc.sentences[0].tokens[static_cast<std::size_t>(i) % 4];
    t.index = static_cast<int>(doc.sentences[0].tokens.size()) + 1;
    doc.sentences[0].tokens.push_back(t);
    const double now = *featurize(doc)[M::unique_words_rate];
    EXPECT_LE(now, prev);
    prev = now;
  }
}

TEST(Catalog, OrderAndNames) {
  ASSERT_EQ(kMetricNames.size(), 24u);
  EXPECT_EQ(kMetricNames.front(), "noun_rate");
  EXPECT_EQ(kMetricNames[20], "mean_yngve_depth");
  EXPECT_EQ(kMetricNames.back(), "unique_words_rate");
  for (std::size_t i = 0; i < kMetricCount; ++i) EXPECT_EQ(parse_metric(kMetricNames[i]), static_cast<Metric>(i));
  EXPECT_FALSE(parse_metric("clause_rate"));
  auto names = metric_names();
  const auto h = catalog_hash(names);
  names.push_back("extra");
  EXPECT_NE(catalog_hash(names), h);
}

TEST(FeaturesIo, ParallelMatchesSerial) {
  styx::Rng rng(3);
  std::vector<ParsedDocument> docs;
  for (int i = 0; i < 57; ++i) {
    docs.push_back(fixtures::random_document(2, 10, rng));
    docs.back().doc_id = "d" + std::to_string(i);
  }
  const MarkerLexicon markers;
  EXPECT_EQ(featurize_all(docs, markers, 1), featurize_all(docs, markers, 4));
}

TEST(FeaturesIo, CsvRoundTripAndNulls) {
  std::vector<LabeledFeatures> rows = {{featurize(i_love_pictures()), AgeGroup::Old}, {featurize(ParsedDocument{}), std::nullopt}};
  rows[1].features.doc_id = "empty";
  std::ostringstream out;
  write_features_csv(out, rows);
  std::istringstream in(out.str());
  const auto table = read_features_csv(in);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].features, rows[0].features);
  EXPECT_EQ(table.rows[0].group, AgeGroup::Old);
  EXPECT_FALSE(table.rows[1].group.has_value());
  EXPECT_EQ(table.rows[1].features, rows[1].features);
}

TEST(FeaturesIo, JsonlUsesNull) {
  std::vector<LabeledFeatures> rows = {{featurize(i_love_pictures()), AgeGroup::Young}};
  std::ostringstream out;
  write_features_jsonl(out, rows);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_TRUE(j["mean_yngve_depth"].is_null());
  EXPECT_EQ(j["age_group"], "Young");
  EXPECT_NEAR(j["noun_rate"].get<double>(), 1.0 / 3, 1e-15);
}
