#pragma once

// QA training-file emission: generated pairs mixed with original records,
// the originals oversampled until they outnumber generated data `ratio` times.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqg/error.hpp"
#include "hopqg/hotpot.hpp"

namespace hopqg {

struct QaExample {
  std::string id;
  std::string question;
  std::string answer;
  std::string context;
  std::string source;  // "generated" or "original"
};

struct AugmentConfig {
  double ratio = 4.0;
  std::uint64_t seed = 0;
};

struct AugmentResult {
  std::vector<QaExample> lines;
  std::size_t copies = 1;
  std::size_t originals = 0;
  std::size_t generated = 0;
};

inline std::size_t oversample_copies(std::size_t originals, std::size_t generated, double ratio) {
  if (originals == 0) return 0;
  double need = ratio * static_cast<double>(generated);
  if (static_cast<double>(originals) >= need) return 1;
  return static_cast<std::size_t>(std::ceil(need / static_cast<double>(originals)));
}

inline AugmentResult emit_augmentation(const std::vector<QaExample>& generated, const std::vector<QaExample>& originals,
                                       const AugmentConfig& cfg = {}) {
  if (!(cfg.ratio >= 1.0)) throw Error(ErrorCode::InvalidInput, "augmentation ratio must be >= 1");
  AugmentResult r;
  r.copies = oversample_copies(originals.size(), generated.size(), cfg.ratio);
  r.generated = generated.size();
  r.originals = originals.size() * r.copies;
  for (std::size_t c = 0; c < r.copies; ++c) {
    for (const auto& o : originals) {
      QaExample e = o;
      if (r.copies > 1) e.id += "#" + std::to_string(c);
      r.lines.push_back(std::move(e));
    }
  }
  r.lines.insert(r.lines.end(), generated.begin(), generated.end());
  // Fisher-Yates with a fixed draw rule so output is identical across
  // standard library implementations.
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = r.lines.size(); i > 1; --i) std::swap(r.lines[i - 1], r.lines[rng() % i]);
  return r;
}

inline nlohmann::json qa_example_to_json(const QaExample& e) {
  nlohmann::json j{{"id", e.id}, {"question", e.question}, {"context", e.context}, {"source", e.source}};
  auto at = e.context.find(e.answer);
  j["answers"] = {{"text", nlohmann::json::array({e.answer})},
                  {"answer_start", nlohmann::json::array({at == std::string::npos ? -1 : static_cast<long>(at)})}};
  return j;
}

inline QaExample qa_example_from_trace(const nlohmann::json& trace) {
  try {
    return {trace.at("id").get<std::string>(), trace.at("question").get<std::string>(),
            trace.at("answer").get<std::string>(), trace.at("context").get<std::string>(), "generated"};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("trace schema: ") + e.what());
  }
}

// All paragraphs, in context order, form the passage.
inline QaExample qa_example_from_hotpot(const HotpotRecord& r) {
  std::vector<std::string> parts;
  for (const auto& p : r.paragraphs) parts.push_back(paragraph_text(p));
  return {r.id, r.question, r.answer, text::join(parts, " "), "original"};
}

}  // namespace hopqg
