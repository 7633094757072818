#pragma once

// Named-metric evaluation of a hypothesis file against aligned reference
// files, reported as JSON or an aligned text table.

#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqg/error.hpp"
#include "hopqg/metrics.hpp"
#include "hopqg/squad.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

inline const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> names = {"bleu1", "bleu2", "bleu3",    "bleu4", "rouge-l",
                                                 "meteor-s", "cider", "em", "f1"};
  return names;
}

inline std::vector<std::string> parse_metric_list(std::string_view csv) {
  std::vector<std::string> out;
  std::string cur;
  auto push = [&] {
    std::string m = text::to_lower(text::trim(cur));
    cur.clear();
    if (m.empty()) return;
    const auto& k = known_metrics();
    if (std::find(k.begin(), k.end(), m) == k.end()) throw Error(ErrorCode::InvalidInput, "unknown metric \"" + m + "\"");
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  for (char c : csv) {
    if (c == ',') push();
    else cur += c;
  }
  push();
  if (out.empty()) throw Error(ErrorCode::InvalidInput, "no metrics requested");
  return out;
}

struct EvaluationParams {
  double rouge_beta = 1.2;
  MeteorParams meteor;
};

// EM/F1 take the best reference per item, then average.
inline double squad_corpus(const Corpus& corpus, bool em) {
  detail::check_corpus(corpus);
  double sum = 0;
  for (const auto& item : corpus) {
    double best = 0;
    for (const auto& r : item.references)
      best = std::max(best, em ? static_cast<double>(exact_match(item.hypothesis, r)) : token_f1(item.hypothesis, r));
    sum += best;
  }
  return sum / static_cast<double>(corpus.size());
}

inline double evaluate_metric(const std::string& m, const Corpus& corpus, const EvaluationParams& p) {
  if (m.rfind("bleu", 0) == 0) return bleu(corpus, m.back() - '0');
  if (m == "rouge-l") return rouge_l_corpus(corpus, p.rouge_beta);
  if (m == "meteor-s") return meteor_corpus(corpus, p.meteor);
  if (m == "cider") return cider(corpus);
  if (m == "em") return squad_corpus(corpus, true);
  if (m == "f1") return squad_corpus(corpus, false);
  throw Error(ErrorCode::InvalidInput, "unknown metric \"" + m + "\"");
}

struct EvaluationReport {
  std::size_t items = 0;
  std::size_t references_per_item = 0;
  std::vector<std::pair<std::string, double>> scores;
  EvaluationParams params;
};

inline EvaluationReport evaluate(const Corpus& corpus, const std::vector<std::string>& metrics,
                                 const EvaluationParams& p = {}) {
  detail::check_corpus(corpus);
  EvaluationReport r;
  r.items = corpus.size();
  r.references_per_item = corpus.front().references.size();
  r.params = p;
  for (const auto& m : metrics) r.scores.emplace_back(m, evaluate_metric(m, corpus, p));
  return r;
}

// Hypotheses and each reference file are read line by line and aligned by
// line number.
inline Corpus corpus_from_lines(const std::vector<std::string>& hyps,
                                const std::vector<std::vector<std::string>>& refs) {
  if (refs.empty()) throw Error(ErrorCode::InvalidInput, "at least one reference file is required");
  for (std::size_t k = 0; k < refs.size(); ++k)
    if (refs[k].size() != hyps.size())
      throw Error(ErrorCode::InvalidInput, "reference file " + std::to_string(k + 1) + " has " +
                                               std::to_string(refs[k].size()) + " lines, hypotheses have " +
                                               std::to_string(hyps.size()));
  Corpus c;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    CorpusItem item{hyps[i], {}};
    for (const auto& r : refs) item.references.push_back(r[i]);
    c.push_back(std::move(item));
  }
  return c;
}

inline nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["scale"] = "fraction";
  j["tokenizer"] = kTokenizerDescription;
  j["items"] = r.items;
  j["references_per_item"] = r.references_per_item;
  j["params"] = {{"rouge_beta", r.params.rouge_beta},
                 {"meteor", {{"alpha", r.params.meteor.alpha}, {"beta", r.params.meteor.beta},
                             {"gamma", r.params.meteor.gamma}, {"stages", "exact,stem"}}},
                 {"cider_scale", 10}};
  j["scores"] = nlohmann::json::object();
  for (const auto& [m, v] : r.scores) j["scores"][m] = v;
  return j;
}

inline std::string report_to_table(const EvaluationReport& r) {
  std::ostringstream os;
  os << "# tokenizer: " << kTokenizerDescription << "\n";
  os << "# scores are fractions; cider is x10\n";
  os << "# items: " << r.items << ", references per item: " << r.references_per_item << "\n";
  os << std::left << std::setw(12) << "metric" << "score\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& [m, v] : r.scores) os << std::setw(12) << m << v << "\n";
  return os.str();
}

}  // namespace hopqg
