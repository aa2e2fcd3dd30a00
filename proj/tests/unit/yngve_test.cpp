#include <gtest/gtest.h>

#include "styx/yngve.hpp"
#include "support/datasets.hpp"
#include "support/yngve_oracle.hpp"

using namespace styx;

TEST(YngveOracle, TreeCountsMatchCayley) {
  // Labeled trees on n nodes with a chosen root: n^(n-1).
  for (int n = 1; n <= 6; ++n) {
    long count = 0;
    oracle::for_each_tree(n, [&](const std::vector<int>&) { ++count; });
    long single = 1;
    for (int i = 0; i < n - 1; ++i) single *= n;
    EXPECT_EQ(count, single) << n;
  }
}

TEST(YngveOracle, ExhaustiveAgreement) {
  const auto r = oracle::exhaustive_sweep(6, [](const Sentence& s) { return yngve_depths(s); });
  EXPECT_GT(r.cases, 100000);
  EXPECT_EQ(r.mismatches, 0);
}

TEST(YngveOracle, RandomLongSentences) {
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = fixtures::random_sentence(1 + rng.below(40), rng);
    EXPECT_EQ(yngve_depths(s), oracle::brute_force_depths(s));
  }
}

TEST(Yngve, PunctDependentsReattach) {
  // 1 <- 2(punct) <- 3(root): token 1 ends up depending on 3.
  Sentence s;
  for (int i = 1; i <= 3; ++i) {
    Token t;
    t.index = i;
    t.form = "w";
    s.tokens.push_back(t);
  }
  s.tokens[0].head = 2;
  s.tokens[0].deprel = "dep";
  s.tokens[1].head = 3;
  s.tokens[1].deprel = "punct";
  s.tokens[2].head = 0;
  s.tokens[2].deprel = "root";
  EXPECT_EQ(yngve_depths(s), (std::vector<int>{1, 0}));
}

TEST(Yngve, DeepLeftBranching) {
  // Each word heads the previous one: a pure left spine of n words.
  Sentence s;
  const int n = 2000;
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.index = i;
    t.head = i == n ? 0 : i + 1;
    t.deprel = i == n ? "root" : "dep";
    s.tokens.push_back(t);
  }
  const auto d = yngve_depths(s);
  EXPECT_EQ(d.front(), n - 1);  // leftmost word: one per level
  EXPECT_EQ(d.back(), 0);
}
