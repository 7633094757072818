#pragma once

// SQuAD answer normalization, exact match and token F1.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hopqg/text.hpp"

namespace hopqg {

// lowercase -> drop ASCII punctuation -> drop articles -> collapse whitespace
inline std::string normalize_answer(std::string_view s) {
  std::string no_punct;
  no_punct.reserve(s.size());
  for (char c : s) {
    if (!text::is_punct(c)) no_punct += text::lower_char(c);
  }
  std::vector<std::string> kept;
  for (auto& w : text::split_ws(no_punct)) {
    if (w != "a" && w != "an" && w != "the") kept.push_back(std::move(w));
  }
  return text::join(kept, " ");
}

inline int exact_match(std::string_view prediction, std::string_view gold) {
  return normalize_answer(prediction) == normalize_answer(gold) ? 1 : 0;
}

// Multiset token overlap F1. Both-empty scores 1, one-empty scores 0.
inline double token_f1(std::string_view prediction, std::string_view gold) {
  auto p = text::split_ws(normalize_answer(prediction));
  auto g = text::split_ws(normalize_answer(gold));
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : g) ++counts[t];
  int same = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  double precision = static_cast<double>(same) / static_cast<double>(p.size());
  double recall = static_cast<double>(same) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace hopqg
