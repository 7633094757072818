#pragma once

// Deterministic rule-based question generator and rewriter. They stand in for
// the neural initial generator / rewriter so the pipeline runs end to end
// without a model service.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hopqg/chain_planner.hpp"
#include "hopqg/context_graph.hpp"
#include "hopqg/error.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

struct TemplateConfig {
  std::string wh_person = "Who";
  std::string wh_location = "Which place";
  std::string wh_other = "What";
  // NE type label (upper-cased) -> wh phrase; consulted before the defaults.
  std::map<std::string, std::string> wh_by_type;
};

inline std::string_view ne_category(std::string_view ne_type) {
  std::string t = text::to_lower(ne_type);
  if (t == "person" || t == "per") return "person";
  if (t == "loc" || t == "location" || t == "gpe" || t == "fac") return "location";
  return "other";
}

inline std::string wh_word(const TemplateConfig& cfg, std::string_view ne_type) {
  std::string upper;
  for (char c : ne_type) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (auto it = cfg.wh_by_type.find(upper); it != cfg.wh_by_type.end()) return it->second;
  auto cat = ne_category(ne_type);
  if (cat == "person") return cfg.wh_person;
  if (cat == "location") return cfg.wh_location;
  return cfg.wh_other;
}

namespace detail {

inline bool is_copula(std::string_view w) {
  return w == "is" || w == "was" || w == "are" || w == "were" || w == "be" || w == "been";
}

}  // namespace detail

// Underscores to spaces, whitespace collapsed.
inline std::string clean_relation(std::string_view rel) {
  std::string r(rel);
  for (char& c : r)
    if (c == '_') c = ' ';
  return text::join(text::split_ws(r), " ");
}

// "is directed by" -> "directed"; anything not of the form aux+...+by is kept.
inline std::string strip_passive(std::string_view rel) {
  auto toks = text::split_ws(clean_relation(rel));
  if (toks.size() >= 2 && toks.back() == "by") {
    toks.pop_back();
    if (toks.size() >= 2 && detail::is_copula(text::to_lower(toks.front()))) toks.erase(toks.begin());
  }
  return text::join(toks, " ");
}

// "directed by", "is directed by": the child-to-parent reading can be turned
// into an active clause about the parent.
inline bool is_passive(std::string_view rel) {
  auto toks = text::split_ws(clean_relation(rel));
  return toks.size() >= 2 && text::to_lower(toks.back()) == "by";
}

// Head noun of the node's "is a <...> X" descriptor, else "one".
inline std::string category_word(const ContextGraph& g, NodeId n) {
  std::optional<std::pair<std::size_t, std::string>> best;
  for (std::size_t ei : g.incident(n)) {
    const Edge& e = g.edges()[ei];
    if (e.source != n) continue;
    auto rel = text::split_ws(text::to_lower(clean_relation(e.relation)));
    if (rel.size() != 1 || !detail::is_copula(rel.front())) continue;
    auto obj = text::split_ws(g.node(e.target).surface);
    if (obj.size() < 2) continue;
    std::string det = text::to_lower(obj.front());
    if (det != "a" && det != "an" && det != "the") continue;
    std::string head = text::bare_word(obj.back());
    if (head.empty()) continue;
    if (!best || e.sentence_index < best->first) best = std::make_pair(e.sentence_index, head);
  }
  return best ? best->second : "one";
}

namespace detail {

inline std::string strip_question_mark(std::string_view q) {
  q = text::trim(q);
  while (!q.empty() && (q.back() == '?' || text::is_space(q.back()))) q.remove_suffix(1);
  return std::string(q);
}

// Word-boundary match, case-sensitive first.
inline std::optional<std::size_t> locate(std::string_view hay, std::string_view needle) {
  if (auto p = text::find_phrase(hay, needle, false)) return p;
  return text::find_phrase(hay, needle, true);
}

}  // namespace detail

// Initial question about the answer N_0 from the edge joining it to N_1.
// When N_1 is the edge's source (answer is the object) a passive relation is
// turned around ("X is directed by Y" asks "Who directed X?") and an active
// one becomes a cleft ("X starred Y" asks "What is it that X starred?",
// "X starring Y" asks "Who is X starring?").
inline std::string template_generate_initial(std::string_view n1, std::string_view relation,
                                             EdgeDirection direction, std::string_view answer_ne_type,
                                             const TemplateConfig& cfg = {}) {
  std::string q = wh_word(cfg, answer_ne_type);
  std::string child(text::trim(n1));
  if (direction == EdgeDirection::ChildToParent && !is_passive(relation)) {
    std::string rel = clean_relation(relation);
    auto toks = text::split_ws(rel);
    bool progressive = !toks.empty() && toks.front().size() > 4 && toks.front().ends_with("ing");
    q += progressive ? " is " + child : " is it that " + child;
    if (!rel.empty()) q += " " + rel;
    return q + "?";
  }
  std::string rel = direction == EdgeDirection::ChildToParent ? strip_passive(relation) : clean_relation(relation);
  if (!rel.empty()) q += " " + rel;
  return q + " " + child + "?";
}

inline std::string bridge_clause(std::string_view child, std::string_view relation, EdgeDirection direction,
                                 std::string_view category) {
  std::string rel = clean_relation(relation);
  std::string head = "the " + std::string(category);
  if (direction == EdgeDirection::ChildToParent) {
    if (is_passive(relation)) return head + " that " + strip_passive(relation) + " " + std::string(child);
    return head + " that " + std::string(child) + " " + rel;
  }
  auto toks = text::split_ws(rel);
  if (toks.size() >= 2 && detail::is_copula(text::to_lower(toks.front()))) {
    toks.erase(toks.begin());
    return head + " " + text::join(toks, " ") + " " + std::string(child);
  }
  return head + " that " + rel + " " + std::string(child);
}

inline std::string intersection_restriction(std::string_view child, std::string_view relation,
                                            EdgeDirection direction, bool on_answer) {
  std::string rel = clean_relation(relation);
  std::string lead = on_answer ? " and" : "";
  if (direction == EdgeDirection::ChildToParent) {
    if (is_passive(relation))
      return (on_answer ? lead + " also " : std::string(" that also ")) + strip_passive(relation) + " " +
             std::string(child);
    return lead + " that " + std::string(child) + " also " + rel;
  }
  return (on_answer ? lead + " also " : std::string(" that also ")) + rel + " " + std::string(child);
}

struct TemplateRewrite {
  std::string question;
  // Text of q_prev that was replaced, and its replacement.
  std::optional<std::pair<std::string, std::string>> substitution;
};

// `parent_phrase` is the text in q_prev currently standing for the parent
// node; nullopt means the parent is the answer (the wh-word).
inline TemplateRewrite template_rewrite(std::string_view q_prev, std::string_view child,
                                        const std::optional<std::string>& parent_phrase,
                                        std::string_view relation, EdgeDirection direction, RewriteType type,
                                        std::string_view category = "one") {
  std::string base = detail::strip_question_mark(q_prev);
  std::optional<std::size_t> at;
  if (parent_phrase && !parent_phrase->empty()) at = detail::locate(base, *parent_phrase);

  if (type == RewriteType::Bridge) {
    if (!at)
      throw Error(ErrorCode::RewriteInapplicable,
                  "bridge rewrite: parent phrase not found in \"" + std::string(q_prev) + "\"");
    std::string clause = bridge_clause(child, relation, direction, category);
    std::string old = base.substr(*at, parent_phrase->size());
    std::string q = base.substr(0, *at) + clause + base.substr(*at + parent_phrase->size()) + "?";
    return {std::move(q), std::make_pair(std::move(old), std::move(clause))};
  }

  if (at) {
    std::string old = base.substr(*at, parent_phrase->size());
    std::string extended = old + intersection_restriction(child, relation, direction, false);
    std::string q = base.substr(0, *at) + extended + base.substr(*at + parent_phrase->size()) + "?";
    return {std::move(q), std::make_pair(std::move(old), std::move(extended))};
  }
  return {base + intersection_restriction(child, relation, direction, true) + "?", std::nullopt};
}

}  // namespace hopqg
