#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "styx/conllu.hpp"

namespace styx {

/// Yngve depths of the non-punctuation words of one sentence, in surface
/// order, computed over the head-outward projection of the dependency tree.
///
/// Every head with dependents becomes a node whose ordered children are its
/// left dependents, a leaf for the head word, then its right dependents. The
/// rightmost child of a node is numbered 0 and numbers grow leftward; a
/// word's depth is the sum of numbers on its root-to-leaf path. So for a head
/// with L left and R right dependents the i-th left dependent adds L + R - i,
/// the head leaf adds R, and the j-th right dependent adds R - 1 - j.
///
/// Tokens with relation `punct` are removed first; their dependents attach to
/// the nearest kept ancestor. If that leaves several top-level words, each
/// heads its own tree starting at depth 0.
inline std::vector<int> yngve_depths(const Sentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  std::vector<bool> kept(n + 1, false);
  for (int i = 1; i <= n; ++i) kept[i] = s.tokens[i - 1].base_deprel() != "punct";

  const auto kept_head = [&](int tok) {
    int h = s.tokens[tok - 1].head;
    for (int guard = 0; h != 0 && !kept[h] && guard <= n; ++guard) h = s.tokens[h - 1].head;
    return h;
  };

  // Surface-ordered dependents; index 0 collects the top-level words.
  std::vector<std::vector<int>> deps(n + 1);
  for (int i = 1; i <= n; ++i)
    if (kept[i]) deps[kept_head(i)].push_back(i);

  std::vector<int> depth(n + 1, 0);
  std::vector<int> stack;
  for (int top : deps[0]) {
    depth[top] = 0;  // depth of the node headed by `top`, until resolved below
    stack.push_back(top);
  }
  while (!stack.empty()) {
    const int h = stack.back();
    stack.pop_back();
    const auto& d = deps[h];
    if (d.empty()) continue;
    const int node = depth[h];
    const int left = static_cast<int>(std::count_if(d.begin(), d.end(), [h](int x) { return x < h; }));
    const int right = static_cast<int>(d.size()) - left;
    for (int i = 0; i < left; ++i) depth[d[i]] = node + left + right - i;
    for (int j = 0; j < right; ++j) depth[d[left + j]] = node + right - 1 - j;
    depth[h] = node + right;
    for (int x : d) stack.push_back(x);
  }

  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (kept[i]) out.push_back(depth[i]);
  return out;
}

/// Mean word depth of a sentence, or nullopt when no word survives
/// punctuation removal.
inline std::optional<double> sentence_yngve(const Sentence& s) {
  const auto d = yngve_depths(s);
  if (d.empty()) return std::nullopt;
  long total = 0;
  for (int x : d) total += x;
  return static_cast<double>(total) / static_cast<double>(d.size());
}

}  // namespace styx
