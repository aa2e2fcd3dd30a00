#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "styx/error.hpp"
#include "styx/text.hpp"

namespace styx {

// Universal Dependencies part-of-speech inventory.
enum class Upos : unsigned char {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::array<std::string_view, 17> kUposNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

inline constexpr std::string_view to_string(Upos u) { return kUposNames[static_cast<int>(u)]; }

inline std::optional<Upos> parse_upos(std::string_view s) {
  for (std::size_t i = 0; i < kUposNames.size(); ++i)
    if (kUposNames[i] == s) return static_cast<Upos>(i);
  return std::nullopt;
}

using Feature = std::pair<std::string, std::string>;

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;
  Upos upos = Upos::X;
  std::string xpos;  // empty when absent
  std::vector<Feature> feats;
  int head = 0;  // 0 = root
  std::string deprel;

  bool has_feat(std::string_view key, std::string_view value) const {
    return std::any_of(feats.begin(), feats.end(), [&](const Feature& f) { return f.first == key && f.second == value; });
  }
  bool has_feat(std::string_view key) const {
    return std::any_of(feats.begin(), feats.end(), [&](const Feature& f) { return f.first == key; });
  }

  /// Relation without its subtype, e.g. "acl" for "acl:relcl".
  std::string_view base_deprel() const {
    std::string_view d = deprel;
    return d.substr(0, d.find(':'));
  }

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  bool operator==(const Sentence&) const = default;
};

struct ParsedDocument {
  std::string doc_id;
  std::vector<Sentence> sentences;
  bool has_trees = true;
  bool operator==(const ParsedDocument&) const = default;
};

struct TreeCheck {
  bool valid = true;
  std::vector<std::string> diagnostics;
};

/// Checks that heads form one tree rooted at a single token with head 0.
/// Every violation is reported, not just the first.
inline TreeCheck validate_tree(const Sentence& s) {
  TreeCheck check;
  const auto fail = [&](std::string msg) {
    check.valid = false;
    check.diagnostics.push_back(std::move(msg));
  };
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) {
    fail("empty sentence");
    return check;
  }
  int roots = 0;
  // Heads that point somewhere usable; the others end a climb.
  std::vector<bool> usable(n + 1, true);
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.index != i + 1) fail("token " + std::to_string(i + 1) + " has index " + std::to_string(t.index));
    if (t.head == 0) ++roots;
    if (t.head < 0 || t.head > n) {
      fail("token " + std::to_string(i + 1) + ": head out of range (" + std::to_string(t.head) + ")");
      usable[i + 1] = false;
    } else if (t.head == i + 1) {
      fail("token " + std::to_string(i + 1) + ": self-loop");
      usable[i + 1] = false;
    }
  }
  if (roots == 0) fail("no root");
  if (roots > 1) fail("multiple roots");

  // A token still climbing after n steps is stuck on, or feeding into, a
  // cycle. Climbs stop at head 0 and at unusable heads.
  const auto climb = [&](int tok, int steps) {
    for (int k = 0; k < steps && tok != 0 && usable[tok]; ++k) tok = s.tokens[tok - 1].head;
    return tok;
  };
  const auto stuck = [&](int tok) {
    const int end = climb(tok, n + 1);
    return end != 0 && usable[end];
  };
  std::vector<bool> reported(n + 1, false);
  for (int i = 1; i <= n; ++i) {
    if (!stuck(i)) continue;
    const int on_cycle = climb(i, n);
    std::vector<int> cycle = {on_cycle};
    for (int t = s.tokens[on_cycle - 1].head; t != on_cycle; t = s.tokens[t - 1].head) cycle.push_back(t);
    std::sort(cycle.begin(), cycle.end());
    if (!reported[cycle.front()]) {
      reported[cycle.front()] = true;
      std::string members;
      for (int c : cycle) members += (members.empty() ? "" : ", ") + std::to_string(c);
      fail("cyclic heads involving tokens " + members);
    }
    if (!std::binary_search(cycle.begin(), cycle.end(), i)) fail("token " + std::to_string(i) + " unreachable from root");
  }
  return check;
}

/// Raised on malformed CoNLL-U. Carries the 1-based sentence ordinal within
/// the stream and the physical line.
class ConlluError : public Error {
 public:
  ConlluError(const std::string& msg, std::size_t sentence, std::size_t line)
      : Error("CoNLL-U sentence " + std::to_string(sentence) + " (line " + std::to_string(line) + "): " + msg),
        sentence_(sentence),
        line_(line) {}
  std::size_t sentence() const { return sentence_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t sentence_;
  std::size_t line_;
};

/// Streams documents out of CoNLL-U text one at a time. `# newdoc` comments
/// open documents; without any, the whole stream is one document.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in, std::string default_doc_id = "doc-1")
      : in_(in), pending_id_(std::move(default_doc_id)) {}

  std::optional<ParsedDocument> next() {
    if (done_) return std::nullopt;
    ParsedDocument doc;
    doc.doc_id = pending_id_;
    Sentence sentence;
    std::size_t sentence_line = 0;

    const auto close_sentence = [&] {
      if (sentence.tokens.empty()) return;
      ++sentence_ordinal_;
      finish_sentence(sentence, sentence_line);
      doc.sentences.push_back(std::move(sentence));
      sentence = Sentence{};
    };

    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) {
        close_sentence();
        continue;
      }
      if (line.front() == '#') {
        if (auto id = newdoc_id(line)) {
          close_sentence();
          ++newdocs_;
          std::string next_id = id->empty() ? "doc-" + std::to_string(newdocs_) : std::move(*id);
          if (!doc.sentences.empty()) {
            pending_id_ = std::move(next_id);
            return doc;
          }
          doc.doc_id = std::move(next_id);
        }
        continue;
      }
      if (sentence.tokens.empty()) sentence_line = line_no_;
      parse_token_line(line, sentence);
    }
    close_sentence();
    done_ = true;
    if (doc.sentences.empty()) return std::nullopt;
    return doc;
  }

 private:
  static std::optional<std::string> newdoc_id(std::string_view line) {
    line.remove_prefix(1);
    line = trim(line);
    if (!starts_with(line, "newdoc")) return std::nullopt;
    line.remove_prefix(6);
    if (!line.empty() && line.front() != ' ' && line.front() != '\t') return std::nullopt;
    line = trim(line);
    if (starts_with(line, "id")) {
      line.remove_prefix(2);
      line = trim(line);
      if (!line.empty() && line.front() == '=') return std::string(trim(line.substr(1)));
    }
    return std::string();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConlluError(msg, sentence_ordinal_ + 1, line_no_); }

  void parse_token_line(const std::string& line, Sentence& sentence) {
    auto cols = split(line, '\t');
    if (cols.size() != 10) fail("expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) return;  // multiword token or empty node
    const auto index = parse_int(id);
    if (!index || *index < 1) fail("non-integer token index '" + id + "'");
    const auto head = parse_int(cols[6]);
    if (!head) fail("non-integer HEAD '" + cols[6] + "'");
    const auto upos = parse_upos(cols[3]);
    if (!upos) fail("unknown UPOS '" + cols[3] + "'");

    Token t;
    t.index = static_cast<int>(*index);
    t.form = cols[1];
    t.lemma = cols[2] == "_" && cols[1] != "_" ? std::string() : cols[2];
    t.upos = *upos;
    t.xpos = cols[4] == "_" ? std::string() : cols[4];
    if (cols[5] != "_") {
      for (auto& kv : split(cols[5], '|')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail("malformed feature '" + kv + "'");
        t.feats.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
    }
    t.head = static_cast<int>(*head);
    t.deprel = cols[7] == "_" ? std::string() : cols[7];
    for (const Token& prev : sentence.tokens)
      if (prev.index == t.index) fail("duplicate token index " + id);
    sentence.tokens.push_back(std::move(t));
  }

  void finish_sentence(Sentence& s, std::size_t first_line) const {
    const int n = static_cast<int>(s.tokens.size());
    const auto err = [&](const std::string& msg) { throw ConlluError(msg, sentence_ordinal_, first_line); };
    for (int i = 0; i < n; ++i)
      if (s.tokens[i].index != i + 1) err("token index " + std::to_string(s.tokens[i].index) + " out of sequence");
    for (const Token& t : s.tokens)
      if (t.head < 0 || t.head > n) err("head out of range: token " + std::to_string(t.index) + " has head " + std::to_string(t.head));
    const auto check = validate_tree(s);
    if (!check.valid) {
      const bool cyclic = std::any_of(check.diagnostics.begin(), check.diagnostics.end(), [](const std::string& d) {
        return d.find("cyclic") != std::string::npos || d.find("self-loop") != std::string::npos;
      });
      err(cyclic ? "cyclic heads" : check.diagnostics.front());
    }
  }

  std::istream& in_;
  std::string pending_id_;
  std::size_t line_no_ = 0;
  std::size_t sentence_ordinal_ = 0;
  std::size_t newdocs_ = 0;
  bool done_ = false;
};

inline std::vector<ParsedDocument> read_conllu(std::istream& in, std::string default_doc_id = "doc-1") {
  ConlluReader reader(in, std::move(default_doc_id));
  std::vector<ParsedDocument> docs;
  while (auto d = reader.next()) docs.push_back(std::move(*d));
  return docs;
}

inline void write_conllu(std::ostream& out, const ParsedDocument& doc) {
  out << "# newdoc id = " << doc.doc_id << '\n';
  const auto col = [](const std::string& s) -> const std::string& {
    static const std::string underscore = "_";
    return s.empty() ? underscore : s;
  };
  for (const Sentence& s : doc.sentences) {
    for (const Token& t : s.tokens) {
      std::string feats;
      for (const auto& [k, v] : t.feats) feats += (feats.empty() ? "" : "|") + k + "=" + v;
      out << t.index << '\t' << col(t.form) << '\t' << col(t.lemma) << '\t' << to_string(t.upos) << '\t'
          << col(t.xpos) << '\t' << col(feats) << '\t' << t.head << '\t' << col(t.deprel) << "\t_\t_\n";
    }
    out << '\n';
  }
}

}  // namespace styx
