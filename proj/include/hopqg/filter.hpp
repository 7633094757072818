#pragma once

// Post-generation filters: question length outside [min_words, max_words]
// (inclusive bounds) and answers that appear verbatim in the question.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hopqg/squad.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

struct FilterConfig {
  std::size_t min_words = 6;
  std::size_t max_words = 30;
};

struct QaPair {
  std::string id;
  std::string question;
  std::string answer;
  nlohmann::json record;  // original input line, passed through
};

struct DroppedPair {
  QaPair pair;
  std::vector<std::string> reasons;
};

struct FilterResult {
  std::vector<QaPair> kept;
  std::vector<DroppedPair> dropped;
};

// The leak test works on SQuAD-normalized text and requires whole-word
// boundaries, so "Cruise" does not leak into "Cruiser".
inline bool answer_leaks(std::string_view question, std::string_view answer) {
  std::string a = normalize_answer(answer);
  if (a.empty()) return false;
  return text::find_phrase(normalize_answer(question), a, false).has_value();
}

inline std::vector<std::string> filter_reasons(std::string_view question, std::string_view answer,
                                               const FilterConfig& cfg = {}) {
  std::vector<std::string> reasons;
  std::size_t n = text::word_count(question);
  if (n < cfg.min_words || n > cfg.max_words) reasons.emplace_back("length");
  if (answer_leaks(question, answer)) reasons.emplace_back("answer-leak");
  return reasons;
}

inline FilterResult filter_generated(std::vector<QaPair> pairs, const FilterConfig& cfg = {}) {
  FilterResult out;
  for (auto& p : pairs) {
    auto reasons = filter_reasons(p.question, p.answer, cfg);
    if (reasons.empty()) out.kept.push_back(std::move(p));
    else out.dropped.push_back({std::move(p), std::move(reasons)});
  }
  return out;
}

}  // namespace hopqg
