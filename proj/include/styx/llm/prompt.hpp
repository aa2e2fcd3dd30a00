#pragma once

#include <string>
#include <string_view>

#include "styx/corpus.hpp"

namespace styx::llm {

/// Bumped whenever the template text changes, so generated corpora can be
/// traced to the exact wording that produced them.
inline constexpr int kPromptTemplateVersion = 1;

inline constexpr std::string_view kPromptTemplate =
    "Write a blog snippet of at most {max_words} words as a {age}-year-old ({group}) writer on the topic: {topic}.";

inline std::string_view group_label(AgeGroup g) {
  switch (g) {
    case AgeGroup::Young: return "young";
    case AgeGroup::MiddleAged: return "middle-aged";
    case AgeGroup::Old: return "old";
  }
  return "";
}

/// Fills the template in one left-to-right pass over the template text, so
/// braces inside substituted values are never expanded again.
inline std::string build_prompt(AgeGroup group, int age, std::string_view topic, int max_words) {
  std::string out;
  std::string_view t = kPromptTemplate;
  while (!t.empty()) {
    const auto open = t.find('{');
    if (open == std::string_view::npos) {
      out += t;
      break;
    }
    out += t.substr(0, open);
    const auto close = t.find('}', open);
    const auto name = t.substr(open + 1, close - open - 1);
    if (name == "max_words")
      out += std::to_string(max_words);
    else if (name == "age")
      out += std::to_string(age);
    else if (name == "group")
      out += group_label(group);
    else if (name == "topic")
      out += topic;
    t.remove_prefix(close + 1);
  }
  return out;
}

}  // namespace styx::llm
