#pragma once

#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "styx/conllu.hpp"
#include "styx/error.hpp"
#include "styx/text.hpp"

namespace styx {

/// Closed-class word list for the fallback tagger: lowercase form -> UPOS.
class Lexicon {
 public:
  Lexicon() = default;

  /// Parses `form<TAB>UPOS` lines. `#` lines and blanks are ignored; the
  /// first entry for a form wins.
  static Lexicon parse(std::string_view text) {
    Lexicon lex;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw Error("lexicon line " + std::to_string(n) + ": expected form<TAB>UPOS");
      const auto upos = parse_upos(trim(std::string_view(line).substr(tab + 1)));
      if (!upos) throw Error("lexicon line " + std::to_string(n) + ": unknown UPOS");
      lex.entries_.emplace(to_lower(trim(std::string_view(line).substr(0, tab))), *upos);
    }
    return lex;
  }

  static Lexicon load(const std::string& path) { return parse(read_file(path)); }

  const Upos* find(const std::string& lower_form) const {
    const auto it = entries_.find(lower_form);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Upos> entries_;
};

namespace detail {

inline bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
inline bool is_terminal(std::string_view tok) { return tok == "." || tok == "!" || tok == "?"; }
inline bool is_symbol(char c) { return std::string_view("$%&@#+=<>^~|*/\\").find(c) != std::string_view::npos; }

/// Whitespace and punctuation boundaries. Apostrophes and hyphens stay inside
/// a word when flanked by word characters; `.` and `,` stay inside numbers.
inline std::vector<std::string> raw_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const char next = i + 1 < text.size() ? text[i + 1] : '\0';
    if (is_space(c)) {
      flush();
    } else if (is_word_byte(c)) {
      cur.push_back(c);
    } else if ((c == '\'' || c == '-') && !cur.empty() && is_word_byte(next)) {
      cur.push_back(c);
    } else if ((c == '.' || c == ',') && !cur.empty() && is_digit(cur.back()) && is_digit(next)) {
      cur.push_back(c);
    } else {
      flush();
      out.emplace_back(1, c);
    }
  }
  flush();
  return out;
}

inline bool is_number(std::string_view tok) {
  if (tok.empty() || !is_digit(tok.front())) return false;
  for (char c : tok)
    if (!is_digit(c) && c != '.' && c != ',') return false;
  return true;
}

inline bool is_subject_pronoun(std::string_view lower) {
  static const std::unordered_set<std::string_view> subjects = {"i", "you", "he", "she", "we", "they", "it"};
  return subjects.contains(lower);
}

inline bool is_possessive_pronoun(std::string_view lower) {
  static const std::unordered_set<std::string_view> poss = {"my",   "your",  "his",  "her",   "its",   "our",
                                                            "their", "mine", "yours", "hers", "ours", "theirs"};
  return poss.contains(lower);
}

}  // namespace detail

/// Rule-based tagger for raw text when no parser output is available.
/// Produces POS tags only (head 0, no relations), so documents it makes have
/// has_trees = false.
///
/// Rules, first match wins:
///  1. punctuation -> PUNCT (SYM for symbol characters); digit strings -> NUM
///  2. lexicon lookup of the lowercased form
///  3. suffixes: -ly ADV; -ing/-ed after an AUX -> VERB; -ness/-tion/-ment
///     NOUN; -ous/-ful/-able ADJ
///  4. after a subject pronoun, an AUX or infinitival "to" -> VERB
///  5. NOUN
/// VERB tokens get Penn xpos from their ending (VBG for -ing, VBN for -ed
/// after an AUX, VBD for other -ed). Possessive pronouns carry Poss=Yes.
class FallbackTagger {
 public:
  explicit FallbackTagger(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  ParsedDocument tag(std::string_view text, std::string doc_id = "doc-1") const {
    ParsedDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.has_trees = false;

    Sentence current;
    bool in_quotes = false;
    const auto tokens = detail::raw_tokens(text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& form = tokens[i];
      if (form == "\"") in_quotes = !in_quotes;
      current.tokens.push_back(tag_token(form, current));
      const bool next_terminal = i + 1 < tokens.size() && detail::is_terminal(tokens[i + 1]);
      if (!in_quotes && detail::is_terminal(form) && !next_terminal) {
        doc.sentences.push_back(std::move(current));
        current = Sentence{};
      }
    }
    if (!current.tokens.empty()) doc.sentences.push_back(std::move(current));
    return doc;
  }

  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Token tag_token(const std::string& form, const Sentence& so_far) const {
    Token t;
    t.index = static_cast<int>(so_far.tokens.size()) + 1;
    t.form = form;
    t.lemma = to_lower(form);
    t.head = 0;
    const std::string& lower = t.lemma;

    const Token* prev = nullptr;
    for (auto it = so_far.tokens.rbegin(); it != so_far.tokens.rend(); ++it)
      if (it->upos != Upos::PUNCT) {
        prev = &*it;
        break;
      }
    const bool after_aux = prev && prev->upos == Upos::AUX;

    if (form.size() == 1 && !detail::is_word_byte(form[0])) {
      t.upos = detail::is_symbol(form[0]) ? Upos::SYM : Upos::PUNCT;
      return t;
    }
    if (detail::is_number(form)) {
      t.upos = Upos::NUM;
      return t;
    }
    if (const Upos* u = lexicon_.find(lower)) {
      t.upos = *u;
      if (t.upos == Upos::PRON && detail::is_possessive_pronoun(lower)) t.feats.emplace_back("Poss", "Yes");
      return t;
    }
    if (ends_with(lower, "ly") && lower.size() > 3) {
      t.upos = Upos::ADV;
    } else if ((ends_with(lower, "ing") || ends_with(lower, "ed")) && after_aux) {
      t.upos = Upos::VERB;
    } else if (ends_with(lower, "ness") || ends_with(lower, "tion") || ends_with(lower, "ment")) {
      t.upos = Upos::NOUN;
    } else if (ends_with(lower, "ous") || ends_with(lower, "ful") || ends_with(lower, "able")) {
      t.upos = Upos::ADJ;
    } else if (prev && ((prev->upos == Upos::PRON && detail::is_subject_pronoun(prev->lemma)) || after_aux ||
                        (prev->upos == Upos::PART && prev->lemma == "to"))) {
      t.upos = Upos::VERB;
    } else {
      t.upos = Upos::NOUN;
    }
    if (t.upos == Upos::VERB) {
      if (ends_with(lower, "ing"))
        t.xpos = "VBG";
      else if (ends_with(lower, "ed"))
        t.xpos = after_aux ? "VBN" : "VBD";
    }
    return t;
  }

  Lexicon lexicon_;
};

}  // namespace styx
