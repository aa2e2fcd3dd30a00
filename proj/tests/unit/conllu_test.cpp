#include <gtest/gtest.h>

#include <sstream>

#include "styx/conllu.hpp"
#include "support/datasets.hpp"

using namespace styx;

namespace {

std::vector<ParsedDocument> parse(const std::string& text) {
  std::istringstream in(text);
  return read_conllu(in);
}

std::string conllu_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConlluError& e) {
    return e.what();
  }
  return "";
}

Sentence chain(std::vector<int> heads) {
  Sentence s;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.index = static_cast<int>(i + 1);
    t.form = "w";
    t.head = heads[i];
    t.deprel = heads[i] == 0 ? "root" : "dep";
    s.tokens.push_back(t);
  }
  return s;
}

bool mentions(const TreeCheck& c, const std::string& what) {
  for (const auto& d : c.diagnostics)
    if (d.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(ReadConllu, TwoTokenSentence) {
  const auto docs = parse("1\tI\tI\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n2\tleft\tleave\tVERB\tVBD\t_\t0\troot\t_\t_\n\n");
  ASSERT_EQ(docs.size(), 1u);
  ASSERT_EQ(docs[0].sentences.size(), 1u);
  const auto& s = docs[0].sentences[0];
  ASSERT_EQ(s.tokens.size(), 2u);
  EXPECT_EQ(s.tokens[1].head, 0);
  EXPECT_EQ(s.tokens[1].lemma, "leave");
  EXPECT_EQ(s.tokens[0].upos, Upos::PRON);
  EXPECT_EQ(s.tokens[0].xpos, "PRP");
  EXPECT_TRUE(docs[0].has_trees);
}

TEST(ReadConllu, HeadOutOfRange) {
  const auto msg = conllu_error(
      "1\ta\ta\tDET\t_\t_\t3\tdet\t_\t_\n2\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n3\tc\tc\tNOUN\t_\t_\t9\tdep\t_\t_\n\n");
  EXPECT_NE(msg.find("head out of range"), std::string::npos) << msg;
  EXPECT_NE(msg.find("sentence 1"), std::string::npos) << msg;
}

TEST(ReadConllu, CyclicHeads) {
  const auto msg = conllu_error("1\ta\ta\tNOUN\t_\t_\t2\tdep\t_\t_\n2\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n\n");
  EXPECT_NE(msg.find("cyclic heads"), std::string::npos) << msg;
}

TEST(ReadConllu, NonIntegerHead) {
  const auto msg = conllu_error("1\ta\ta\tNOUN\t_\t_\tx\troot\t_\t_\n\n");
  EXPECT_NE(msg.find("non-integer HEAD"), std::string::npos) << msg;
}

TEST(ReadConllu, DuplicateIndex) {
  const auto msg = conllu_error("1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n1\tb\tb\tNOUN\t_\t_\t1\tdep\t_\t_\n\n");
  EXPECT_NE(msg.find("duplicate token index"), std::string::npos) << msg;
}

TEST(ReadConllu, SentenceOrdinalInError) {
  const auto msg = conllu_error("1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n\n1\tb\tb\tNOUN\t_\t_\t5\troot\t_\t_\n\n");
  EXPECT_NE(msg.find("sentence 2"), std::string::npos) << msg;
}

TEST(ReadConllu, UnknownUpos) {
  EXPECT_NE(conllu_error("1\ta\ta\tFOO\t_\t_\t0\troot\t_\t_\n\n").find("unknown UPOS"), std::string::npos);
}

TEST(ReadConllu, SkipsMultiwordRangesAndEmptyNodes) {
  const auto docs = parse(
      "# text = don't go\n"
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_\n"
      "2\tn't\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_\n"
      "3\tgo\tgo\tVERB\tVB\t_\t0\troot\t_\t_\n"
      "3.1\tgone\tgo\tVERB\t_\t_\t_\t_\t3:dep\t_\n\n");
  ASSERT_EQ(docs.at(0).sentences.at(0).tokens.size(), 3u);
  EXPECT_EQ(docs[0].sentences[0].tokens[1].form, "n't");
}

TEST(ReadConllu, NewdocSplitsDocuments) {
  const auto docs = parse(
      "# newdoc id = a\n1\tx\tx\tNOUN\t_\t_\t0\troot\t_\t_\n\n"
      "1\ty\ty\tNOUN\t_\t_\t0\troot\t_\t_\n\n"
      "# newdoc id = b\n1\tz\tz\tNOUN\t_\t_\t0\troot\t_\t_\n\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "a");
  EXPECT_EQ(docs[0].sentences.size(), 2u);
  EXPECT_EQ(docs[1].doc_id, "b");
}

TEST(ReadConllu, NoNewdocMeansOneDocument) {
  const auto docs = parse("1\tx\tx\tNOUN\t_\t_\t0\troot\t_\t_\n\n1\ty\ty\tNOUN\t_\t_\t0\troot\t_\t_\n");
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_EQ(docs[0].sentences.size(), 2u);
}

TEST(ReadConllu, FeatsAndSubtypes) {
  const auto docs = parse("1\tmy\tmy\tPRON\tPRP$\tPerson=1|Poss=Yes\t2\tnmod:poss\t_\t_\n2\tdog\tdog\tNOUN\tNN\t_\t0\troot\t_\t_\n");
  const auto& t = docs[0].sentences[0].tokens[0];
  EXPECT_TRUE(t.has_feat("Poss", "Yes"));
  EXPECT_TRUE(t.has_feat("Person"));
  EXPECT_FALSE(t.has_feat("Poss", "No"));
  EXPECT_EQ(t.base_deprel(), "nmod");
}

TEST(ReadConllu, RoundTripPreservesFields) {
  styx::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto doc = fixtures::random_document(1 + rng.below(4), 9, rng);
    doc.doc_id = "d" + std::to_string(trial);
    std::ostringstream out;
    write_conllu(out, doc);
    const auto back = parse(out.str());
    ASSERT_EQ(back.size(), 1u);
    ASSERT_EQ(back[0].sentences.size(), doc.sentences.size());
    for (std::size_t s = 0; s < doc.sentences.size(); ++s)
      for (std::size_t i = 0; i < doc.sentences[s].tokens.size(); ++i) {
        const auto& a = doc.sentences[s].tokens[i];
        const auto& b = back[0].sentences[s].tokens[i];
        EXPECT_EQ(a.form, b.form);
        EXPECT_EQ(a.lemma, b.lemma);
        EXPECT_EQ(a.upos, b.upos);
        EXPECT_EQ(a.xpos, b.xpos);
        EXPECT_EQ(a.head, b.head);
        EXPECT_EQ(a.deprel, b.deprel);
        EXPECT_EQ(a.feats, b.feats);
      }
    EXPECT_EQ(back[0].doc_id, doc.doc_id);
  }
}

TEST(ReadConllu, EveryReadSentenceValidates) {
  styx::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto doc = fixtures::random_document(3, 12, rng);
    std::ostringstream out;
    write_conllu(out, doc);
    for (const auto& d : parse(out.str()))
      for (const auto& s : d.sentences) EXPECT_TRUE(validate_tree(s).valid);
  }
}

TEST(ValidateTree, SingleRootToken) { EXPECT_TRUE(validate_tree(chain({0})).valid); }

TEST(ValidateTree, MultipleRoots) {
  const auto c = validate_tree(chain({0, 0}));
  EXPECT_FALSE(c.valid);
  EXPECT_TRUE(mentions(c, "multiple roots"));
}

TEST(ValidateTree, ChainIsValid) {
  // 1 <- 2 <- 3, token 3 is the root.
  EXPECT_TRUE(validate_tree(chain({2, 3, 0})).valid);
}

TEST(ValidateTree, ListsEveryViolation) {
  const auto c = validate_tree(chain({2, 1, 7, 4}));
  EXPECT_FALSE(c.valid);
  EXPECT_TRUE(mentions(c, "no root"));
  EXPECT_TRUE(mentions(c, "head out of range"));
  EXPECT_TRUE(mentions(c, "self-loop"));
  EXPECT_TRUE(mentions(c, "cyclic"));
}

TEST(ValidateTree, EmptySentence) { EXPECT_FALSE(validate_tree(Sentence{}).valid); }
