#pragma once

// HotpotQA-style records and the rule-based stand-ins for the reasoning-type
// classifier, question decomposer and single-hop reader.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hopqg/context.hpp"
#include "hopqg/error.hpp"
#include "hopqg/squad.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

enum class ReasoningType { Bridge, Intersection, Comparison, OneHop };

inline std::string_view to_string(ReasoningType t) {
  switch (t) {
    case ReasoningType::Bridge: return "bridge";
    case ReasoningType::Intersection: return "intersection";
    case ReasoningType::Comparison: return "comparison";
    case ReasoningType::OneHop: return "onehop";
  }
  return "?";
}

inline ReasoningType reasoning_type_from_string(std::string_view s) {
  std::string l = text::to_lower(text::trim(s));
  if (l == "bridge") return ReasoningType::Bridge;
  if (l == "intersection") return ReasoningType::Intersection;
  if (l == "comparison") return ReasoningType::Comparison;
  if (l == "onehop" || l == "one-hop" || l == "single-hop") return ReasoningType::OneHop;
  throw Error(ErrorCode::Backend, "unknown reasoning type label \"" + std::string(s) + "\"");
}

struct Paragraph {
  std::string title;
  std::vector<std::string> sentences;
};

struct SupportingFact {
  std::string title;
  std::size_t sentence = 0;
  friend bool operator==(const SupportingFact&, const SupportingFact&) = default;
};

struct HotpotRecord {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<Paragraph> paragraphs;
  std::vector<SupportingFact> supporting_facts;
  std::string type;
  std::string level;
  std::optional<AnnotatedContext> annotated;

  const Paragraph* paragraph(std::string_view title) const {
    for (const auto& p : paragraphs)
      if (p.title == title) return &p;
    return nullptr;
  }
};

inline HotpotRecord hotpot_from_json(const nlohmann::json& j) {
  HotpotRecord r;
  try {
    r.id = j.at("_id").is_string() ? j.at("_id").get<std::string>() : j.at("_id").dump();
    r.question = j.at("question").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    for (const auto& p : j.at("context")) {
      Paragraph para;
      para.title = p.at(0).get<std::string>();
      para.sentences = p.at(1).get<std::vector<std::string>>();
      r.paragraphs.push_back(std::move(para));
    }
    for (const auto& f : j.at("supporting_facts"))
      r.supporting_facts.push_back({f.at(0).get<std::string>(), f.at(1).get<std::size_t>()});
    r.type = j.value("type", std::string{});
    r.level = j.value("level", std::string{});
    if (j.contains("annotated_context") && !j.at("annotated_context").is_null())
      r.annotated = context_from_json(j.at("annotated_context"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("HotpotQA record schema: ") + e.what());
  }
  if (text::trim(r.question).empty()) throw Error(ErrorCode::InvalidInput, "empty question");
  for (const auto& f : r.supporting_facts) {
    const Paragraph* p = r.paragraph(f.title);
    if (!p || f.sentence >= p->sentences.size())
      throw Error(ErrorCode::InvalidInput,
                  "supporting fact [" + f.title + ", " + std::to_string(f.sentence) + "] names no sentence");
  }
  return r;
}

// The two paragraphs the supporting facts draw on, in context order. A
// two-paragraph context is taken whole even when one paragraph has no facts.
inline std::pair<const Paragraph*, const Paragraph*> gold_paragraphs(const HotpotRecord& r) {
  if (r.paragraphs.size() == 2) return {&r.paragraphs[0], &r.paragraphs[1]};
  std::vector<const Paragraph*> gold;
  for (const auto& p : r.paragraphs) {
    bool used = std::any_of(r.supporting_facts.begin(), r.supporting_facts.end(),
                            [&](const SupportingFact& f) { return f.title == p.title; });
    if (used) gold.push_back(&p);
  }
  if (gold.size() != 2)
    throw Error(ErrorCode::InvalidInput,
                "supporting facts span " + std::to_string(gold.size()) + " paragraphs, expected 2");
  return {gold[0], gold[1]};
}

inline std::string paragraph_text(const Paragraph& p) { return text::join(p.sentences, " "); }

namespace rules {

// Aligned with text::split_ws(q); pure-punctuation tokens become "".
inline std::vector<std::string> lower_words(std::string_view q) {
  std::vector<std::string> out;
  for (const auto& w : text::split_ws(q)) out.push_back(text::to_lower(text::strip_edge_punct(w)));
  return out;
}

inline bool in(std::string_view w, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), w) != set.end();
}

inline bool is_relative_marker(std::string_view w) {
  return in(w, {"that", "which", "who", "whom", "whose", "where", "when"});
}

inline bool is_preposition(std::string_view w) {
  return in(w, {"to", "in", "of", "for", "from", "with", "by", "on", "at", "about", "into", "under"});
}

inline bool is_determiner(std::string_view w) { return in(w, {"the", "a", "an"}); }

inline bool is_aux(std::string_view w) {
  return in(w, {"is", "was", "are", "were", "did", "does", "do", "has", "have", "had", "can", "could", "will"});
}

inline bool is_participle(std::string_view w) {
  return w.size() > 3 && (w.ends_with("ed") || w.ends_with("en"));
}

inline bool is_comparative_cue(std::string_view w) {
  return in(w, {"more", "less", "longer", "shorter", "first", "earlier", "later", "older", "younger", "larger",
                "smaller", "bigger", "higher", "lower", "greater", "fewer", "last", "most", "least", "taller",
                "same"});
}

}  // namespace rules

// Comparison: "both", or a comparative cue alongside "or"/"," choices.
// Intersection: "and" joining a second lowercase predicate.
// Bridge: an embedded relative clause, possessive, participial "the X <verb>ed
// by", or nested "of" phrases. Everything else is OneHop.
inline ReasoningType rule_classify(std::string_view question) {
  auto w = rules::lower_words(question);
  auto raw = text::split_ws(question);
  bool has_or = std::find(w.begin(), w.end(), "or") != w.end() || question.find(',') != std::string_view::npos;
  if (std::find(w.begin(), w.end(), "both") != w.end()) return ReasoningType::Comparison;
  if (has_or && std::any_of(w.begin(), w.end(), [](const std::string& x) { return rules::is_comparative_cue(x); }))
    return ReasoningType::Comparison;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (w[i] != "and") continue;
    std::string_view next = text::strip_edge_punct(raw[i + 1]);
    if (!next.empty() && !text::is_capitalized(next) && !rules::is_determiner(w[i + 1])) {
      return ReasoningType::Intersection;
    }
  }
  for (std::size_t i = 1; i < w.size(); ++i)
    if (rules::is_relative_marker(w[i])) return ReasoningType::Bridge;
  if (question.find("'s ") != std::string_view::npos) return ReasoningType::Bridge;
  for (std::size_t i = 2; i + 1 < w.size(); ++i) {
    if (w[i + 1] == "by" && rules::is_participle(w[i]) && !rules::is_aux(w[i - 1]))
      return ReasoningType::Bridge;
  }
  if (std::count(w.begin(), w.end(), "of") >= 2) return ReasoningType::Bridge;
  return ReasoningType::OneHop;
}

inline constexpr std::string_view kAnswerPlaceholder = "[ANSWER]";

struct Decomposition {
  std::string subq1;
  // May contain kAnswerPlaceholder, filled with subq1's answer.
  std::string subq2;
};

inline std::string fill_placeholder(std::string subq, std::string_view answer) {
  auto at = subq.find(kAnswerPlaceholder);
  if (at != std::string::npos) subq.replace(at, kAnswerPlaceholder.size(), answer);
  return subq;
}

namespace detail {

inline std::string as_question(std::vector<std::string> toks) {
  while (!toks.empty() && toks.back() == "?") toks.pop_back();
  if (!toks.empty()) {
    std::string& last = toks.back();
    while (!last.empty() && (last.back() == '?' || last.back() == '.')) last.pop_back();
  }
  std::string s = text::join(toks, " ");
  return text::capitalize_first(s) + "?";
}

inline std::vector<std::string> slice(const std::vector<std::string>& v, std::size_t b, std::size_t e) {
  return {v.begin() + static_cast<std::ptrdiff_t>(b), v.begin() + static_cast<std::ptrdiff_t>(e)};
}

// "When was [the university attended by X] founded?": an outer question
// opened by an auxiliary keeps its main verb, which sits at the very end.
inline void return_main_verb(std::vector<std::string>& q1, std::vector<std::string>& q2) {
  if (q2.size() < 3 || q1.size() < 4) return;
  if (!rules::is_aux(text::to_lower(q2[q2.size() - 2]))) return;
  std::string verb = q1.back();
  if (text::is_capitalized(text::strip_edge_punct(verb))) return;
  q1.pop_back();
  q2.push_back(std::move(verb));
}

}  // namespace detail

// Splits at the embedded clause. The clause becomes subq1 ("To which film ...")
// and the outer question keeps a placeholder where the clause's NP stood.
inline std::optional<Decomposition> rule_decompose_bridge(std::string_view question) {
  auto raw = text::split_ws(question);
  auto w = rules::lower_words(question);
  if (raw.size() < 4) return std::nullopt;

  auto np_start_before = [&](std::size_t end) -> std::optional<std::size_t> {
    for (std::size_t k = end; k-- > 0 && end - k <= 4;) {
      if (rules::is_determiner(w[k])) return k;
    }
    return std::nullopt;
  };

  // Relative clause: [the N] [prep] which/that/who ... <end>
  for (std::size_t i = 2; i < w.size(); ++i) {
    if (!rules::is_relative_marker(w[i])) continue;
    std::size_t clause = i > 0 && rules::is_preposition(w[i - 1]) ? i - 1 : i;
    auto np = np_start_before(clause);
    if (!np || *np == 0 || *np + 1 >= clause) continue;
    auto noun = detail::slice(raw, *np + 1, clause);
    auto rest = detail::slice(raw, i + 1, raw.size());
    if (rest.empty()) continue;
    std::vector<std::string> q1;
    if (clause != i) q1 = {raw[clause], "which"};
    else q1 = {"which"};
    if (w[i] == "whose") {
      q1.back() = "which";
      noun.back() += "'s";
    }
    q1.insert(q1.end(), noun.begin(), noun.end());
    q1.insert(q1.end(), rest.begin(), rest.end());
    auto q2 = detail::slice(raw, 0, *np);
    q2.emplace_back(kAnswerPlaceholder);
    detail::return_main_verb(q1, q2);
    return Decomposition{detail::as_question(q1), detail::as_question(q2)};
  }

  // Participial clause: the N <verb>ed by ...
  for (std::size_t i = 2; i + 2 < w.size(); ++i) {
    if (!(w[i + 1] == "by" && rules::is_participle(w[i]))) continue;
    auto np = np_start_before(i);
    if (!np || *np == 0 || *np + 1 >= i) continue;
    std::vector<std::string> q1 = {"which"};
    auto noun = detail::slice(raw, *np + 1, i);
    q1.insert(q1.end(), noun.begin(), noun.end());
    q1.emplace_back("was");
    auto rest = detail::slice(raw, i, raw.size());
    q1.insert(q1.end(), rest.begin(), rest.end());
    auto q2 = detail::slice(raw, 0, *np);
    q2.emplace_back(kAnswerPlaceholder);
    detail::return_main_verb(q1, q2);
    return Decomposition{detail::as_question(q1), detail::as_question(q2)};
  }

  // Nested "of": ... the X of the Y of Z -> "What is the Y of Z?"
  std::optional<std::size_t> last_of;
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (w[i] == "of") last_of = i;
  if (last_of) {
    auto np = np_start_before(*last_of);
    if (np && *np > 0 && *np + 1 < *last_of) {
      bool nested = false;
      for (std::size_t k = 0; k < *np; ++k) nested = nested || w[k] == "of";
      if (nested) {
        std::vector<std::string> q1 = {"what", "is"};
        auto inner = detail::slice(raw, *np, raw.size());
        q1.insert(q1.end(), inner.begin(), inner.end());
        auto q2 = detail::slice(raw, 0, *np);
        q2.emplace_back(kAnswerPlaceholder);
        return Decomposition{detail::as_question(q1), detail::as_question(q2)};
      }
    }
  }

  // Single "of" before a name: ... the N of The Road born -> "What is the N of The Road?"
  for (std::size_t i = 2; i + 1 < w.size(); ++i) {
    if (w[i] != "of") continue;
    auto np = np_start_before(i);
    if (!np || *np == 0 || *np + 1 >= i) continue;
    std::size_t end = i + 1;
    while (end < raw.size()) {
      std::string_view t = text::strip_edge_punct(raw[end]);
      bool connector = (w[end] == "of" || w[end] == "the") && end + 1 < raw.size() &&
                       text::is_capitalized(text::strip_edge_punct(raw[end + 1]));
      if (t.empty() || !(text::is_capitalized(t) || connector)) break;
      ++end;
      if (raw[end - 1].back() == '?') break;
    }
    if (end == i + 1) continue;
    std::vector<std::string> q1 = {"what", "is"};
    auto inner = detail::slice(raw, *np, end);
    q1.insert(q1.end(), inner.begin(), inner.end());
    auto q2 = detail::slice(raw, 0, *np);
    q2.emplace_back(kAnswerPlaceholder);
    auto tail = detail::slice(raw, end, raw.size());
    q2.insert(q2.end(), tail.begin(), tail.end());
    return Decomposition{detail::as_question(q1), detail::as_question(q2)};
  }
  return std::nullopt;
}

// "Who starred in X and married Y?" -> "Who starred in X?", "Who married Y?"
inline std::optional<Decomposition> rule_decompose_intersection(std::string_view question) {
  auto raw = text::split_ws(question);
  auto w = rules::lower_words(question);
  if (raw.size() < 4) return std::nullopt;
  std::size_t wh = 1;
  if ((w[0] == "which" || w[0] == "what") && !rules::is_aux(w[1]) && !text::is_capitalized(raw[1])) wh = 2;
  for (std::size_t i = wh + 1; i + 1 < raw.size(); ++i) {
    if (w[i] != "and") continue;
    std::string_view next = text::strip_edge_punct(raw[i + 1]);
    if (next.empty() || text::is_capitalized(next) || rules::is_determiner(w[i + 1])) continue;
    auto head = detail::slice(raw, 0, wh);
    auto q1 = head;
    auto a = detail::slice(raw, wh, i);
    q1.insert(q1.end(), a.begin(), a.end());
    auto q2 = head;
    auto b = detail::slice(raw, i + 1, raw.size());
    q2.insert(q2.end(), b.begin(), b.end());
    return Decomposition{detail::as_question(q1), detail::as_question(q2)};
  }
  return std::nullopt;
}

inline std::optional<Decomposition> rule_decompose(std::string_view question, ReasoningType type) {
  if (type == ReasoningType::Bridge) return rule_decompose_bridge(question);
  if (type == ReasoningType::Intersection) return rule_decompose_intersection(question);
  return std::nullopt;
}

namespace detail {

struct Candidate {
  std::size_t begin = 0;  // byte offsets into the sentence
  std::size_t end = 0;
  std::size_t first_word = 0;
};

inline bool is_year(std::string_view w) {
  return w.size() == 4 && std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Capitalized runs (joined by lowercase "of"/"for"/"the"/"and" connectors)
// and four-digit years.
inline std::vector<Candidate> answer_candidates(std::string_view sentence) {
  auto ws = text::words(sentence);
  auto word = [&](std::size_t i) { return sentence.substr(ws[i].begin, ws[i].end - ws[i].begin); };
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < ws.size();) {
    std::string_view w = text::strip_edge_punct(word(i));
    if (is_year(w)) {
      std::size_t b = ws[i].begin + (word(i).find(w));
      out.push_back({b, b + w.size(), i});
      ++i;
      continue;
    }
    if (w.empty() || !std::isupper(static_cast<unsigned char>(w.front()))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t last = i;
    while (j + 1 < ws.size()) {
      std::string_view cur = word(j);
      if (!cur.empty() && (text::is_punct(cur.back()) && cur.back() != '.')) break;
      if (cur.ends_with("'s")) break;
      std::string_view nxt = text::strip_edge_punct(word(j + 1));
      if (!nxt.empty() && std::isupper(static_cast<unsigned char>(nxt.front()))) {
        last = j = j + 1;
        continue;
      }
      if (rules::in(text::to_lower(nxt), {"of", "for", "the", "and", "de", "von"}) && j + 2 < ws.size()) {
        std::string_view after = text::strip_edge_punct(word(j + 2));
        if (!after.empty() && std::isupper(static_cast<unsigned char>(after.front()))) {
          last = j = j + 2;
          continue;
        }
      }
      break;
    }
    std::string_view first = word(i);
    std::string_view final_word = word(last);
    std::size_t b = ws[i].begin + first.find(text::strip_edge_punct(first));
    std::string_view stripped_last = text::strip_edge_punct(final_word);
    std::size_t e = ws[last].begin + final_word.find(stripped_last) + stripped_last.size();
    std::string_view span = sentence.substr(b, e - b);
    if (auto pos = span.find("'s"); pos != std::string_view::npos) e = b + pos;
    std::string lowered = text::to_lower(sentence.substr(b, e - b));
    bool trivial = text::is_pronoun(lowered) || text::is_stopword(lowered);
    if (!trivial && e > b) out.push_back({b, e, i});
    i = last + 1;
  }
  return out;
}

inline std::set<std::string> stem_set(const std::vector<std::string>& ws) {
  std::set<std::string> s;
  for (const auto& w : ws) s.insert(text::light_stem(w));
  return s;
}

}  // namespace detail

// Single-hop reader: picks the sentence sharing most (stemmed) content words
// with the question, counting the question's lowercase "relation" words
// twice, then returns the first entity/year span after the last relation-word
// hit that the question does not already mention. Empty when nothing fits.
inline std::string rule_answer(std::string_view question, const std::vector<std::string>& sentences) {
  std::vector<std::string> relation;
  for (auto w : text::words(question)) {
    std::string_view raw = text::strip_edge_punct(question.substr(w.begin, w.end - w.begin));
    if (raw.empty() || std::isupper(static_cast<unsigned char>(raw.front()))) continue;
    std::string b = text::bare_word(raw);
    if (!b.empty() && !text::is_stopword(b)) relation.push_back(b);
  }
  auto q_stems = detail::stem_set(text::content_words(question));
  auto rel_stems = detail::stem_set(relation);
  std::set<std::string> q_content;
  for (const auto& w : text::content_words(question)) q_content.insert(w);

  std::optional<std::size_t> best;
  int best_score = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    int score = 0;
    for (const auto& st : detail::stem_set(text::content_words(sentences[s])))
      score += q_stems.count(st) ? (rel_stems.count(st) ? 2 : 1) : 0;
    if (score > best_score) {
      best_score = score;
      best = s;
    }
  }
  if (!best) return {};
  const std::string& sent = sentences[*best];
  std::vector<detail::Candidate> cands;
  for (const auto& c : detail::answer_candidates(sent)) {
    auto cw = text::content_words(sent.substr(c.begin, c.end - c.begin));
    bool mentioned = !cw.empty() && std::all_of(cw.begin(), cw.end(), [&](const std::string& x) {
      return q_content.count(x) > 0;
    });
    if (!mentioned) cands.push_back(c);
  }
  if (cands.empty()) return {};
  auto ws = text::words(sent);
  std::optional<std::size_t> last_rel;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    std::string b = text::bare_word(std::string_view(sent).substr(ws[i].begin, ws[i].end - ws[i].begin));
    if (!b.empty() && rel_stems.count(text::light_stem(b))) last_rel = i;
  }
  const detail::Candidate* pick = &cands.front();
  if (last_rel) {
    const detail::Candidate* after = nullptr;
    for (const auto& c : cands) {
      if (c.first_word > *last_rel) {
        after = &c;
        break;
      }
    }
    if (after) {
      pick = after;
    } else {
      std::size_t best_dist = SIZE_MAX;
      for (const auto& c : cands) {
        std::size_t dist = *last_rel - c.first_word;
        if (dist < best_dist) {
          best_dist = dist;
          pick = &c;
        }
      }
    }
  }
  return sent.substr(pick->begin, pick->end - pick->begin);
}

// Set overlap of content words.
inline std::size_t content_overlap(std::string_view a, std::string_view b) {
  auto aw = text::content_words(a);
  auto bw = text::content_words(b);
  std::set<std::string> as(aw.begin(), aw.end());
  std::size_t n = 0;
  for (const auto& w : std::set<std::string>(bw.begin(), bw.end())) n += as.count(w);
  return n;
}

// Which paragraph does `q1` concern? 0 or 1, nullopt when neither overlaps.
// Title overlap decides first, then whole-paragraph overlap, then P1.
inline std::optional<int> concerned_paragraph(std::string_view q1, const Paragraph& p1, const Paragraph& p2) {
  std::size_t t1 = content_overlap(q1, p1.title), t2 = content_overlap(q1, p2.title);
  std::size_t f1 = content_overlap(q1, p1.title + " " + paragraph_text(p1));
  std::size_t f2 = content_overlap(q1, p2.title + " " + paragraph_text(p2));
  if (f1 == 0 && f2 == 0) return std::nullopt;
  if (t1 != t2) return t1 > t2 ? 0 : 1;
  if (f1 != f2) return f1 > f2 ? 0 : 1;
  return 0;
}

}  // namespace hopqg
