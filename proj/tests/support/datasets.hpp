#pragma once

// Synthetic inputs shared by the unit tests and the acceptance runner.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "styx/conllu.hpp"
#include "styx/ml/matrix.hpp"
#include "styx/ml/scaler.hpp"
#include "styx/random.hpp"

namespace fixtures {

/// Three isotropic Gaussian blobs, centers (0,0), (5,0), (0,5), equal class
/// sizes, labels interleaved 0,1,2,0,1,2,...
struct Blobs {
  styx::ml::Matrix x;
  std::vector<int> y;

  styx::ml::SparseRows sparse() const {
    styx::ml::SparseRows rows;
    for (std::size_t i = 0; i < x.rows(); ++i) rows.emplace_back(x.row(i).begin(), x.row(i).end());
    return rows;
  }
};

inline Blobs make_blobs(std::size_t n, std::uint64_t seed, double sd = 0.3) {
  constexpr std::array<std::array<double, 2>, 3> centers = {{{0, 0}, {5, 0}, {0, 5}}};
  styx::Rng rng(seed);
  Blobs b{styx::ml::Matrix(n, 2), std::vector<int>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 3);
    b.y[i] = c;
    b.x(i, 0) = rng.normal(centers[c][0], sd);
    b.x(i, 1) = rng.normal(centers[c][1], sd);
  }
  return b;
}

/// Rows [begin, end) of a blob set.
inline Blobs slice(const Blobs& b, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx;
  for (std::size_t i = begin; i < end; ++i) idx.push_back(i);
  Blobs out{b.x.select_rows(idx), {}};
  for (std::size_t i : idx) out.y.push_back(b.y[i]);
  return out;
}

inline styx::ml::Matrix random_matrix(std::size_t rows, std::size_t cols, styx::Rng& rng) {
  styx::ml::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline constexpr std::array<styx::Upos, 17> kAllUpos = {
    styx::Upos::ADJ,  styx::Upos::ADP,  styx::Upos::ADV,   styx::Upos::AUX,   styx::Upos::CCONJ, styx::Upos::DET,
    styx::Upos::INTJ, styx::Upos::NOUN, styx::Upos::NUM,   styx::Upos::PART,  styx::Upos::PRON,  styx::Upos::PROPN,
    styx::Upos::PUNCT, styx::Upos::SCONJ, styx::Upos::SYM, styx::Upos::VERB, styx::Upos::X};

/// A random but valid parsed sentence: a random tree with random tags,
/// forms drawn from a small vocabulary so repeats occur.
inline styx::Sentence random_sentence(std::size_t n, styx::Rng& rng) {
  static const std::array<const char*, 16> vocab = {"i",   "the", "dog", "so",  "well", "my", "run", "this",
                                                     "you", "know", "ran", "big", "that", "of", "me", "cats"};
  static const std::array<const char*, 6> xpos = {"VBD", "VBZ", "VBG", "VBN", "VB", "NN"};
  static const std::array<const char*, 7> rels = {"nsubj", "obj", "advcl", "acl:relcl", "ccomp", "det", "amod"};
  styx::Sentence s;
  const std::size_t root = 1 + rng.below(n);
  for (std::size_t i = 1; i <= n; ++i) {
    styx::Token t;
    t.index = static_cast<int>(i);
    t.form = vocab[rng.below(vocab.size())];
    t.lemma = t.form;
    t.upos = kAllUpos[rng.below(kAllUpos.size())];
    if (rng.below(2)) t.xpos = xpos[rng.below(xpos.size())];
    if (rng.below(4) == 0) t.feats = {{"Poss", "Yes"}};
    s.tokens.push_back(t);
  }
  // Attach each token to one already in the tree; visiting order is a
  // random permutation starting at the root, so any shape can arise.
  std::vector<std::size_t> order;
  for (std::size_t i = 1; i <= n; ++i)
    if (i != root) order.push_back(i);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> placed = {root};
  s.tokens[root - 1].head = 0;
  s.tokens[root - 1].deprel = "root";
  for (std::size_t i : order) {
    auto& t = s.tokens[i - 1];
    t.head = static_cast<int>(placed[rng.below(placed.size())]);
    t.deprel = t.upos == styx::Upos::PUNCT ? "punct" : rels[rng.below(rels.size())];
    placed.push_back(i);
  }
  return s;
}

inline styx::ParsedDocument random_document(std::size_t sentences, std::size_t max_len, styx::Rng& rng) {
  styx::ParsedDocument d;
  d.doc_id = "rand";
  for (std::size_t i = 0; i < sentences; ++i) d.sentences.push_back(random_sentence(1 + rng.below(max_len), rng));
  return d;
}

}  // namespace fixtures
