#pragma once

// Serialized generator inputs:
//   <bos> S_i <nodeC> N_i <edge> E_i <nodeP> N_P <type> R_i <subq> Q_{i-1} <eos>
// The nodeC and nodeP blocks swap when the parent is the edge's source; the
// initial step omits the type/subq blocks. Every whitespace token carries one
// segment label, and tokens of S_i / Q_{i-1} that spell a parent mention are
// relabeled NodeP.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hopqg/chain_planner.hpp"
#include "hopqg/context_graph.hpp"
#include "hopqg/error.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

enum class SegmentLabel { ContextSentence, NodeC, EdgeText, NodeP, TypeTag, SubQuestion, Marker };

inline std::string_view to_string(SegmentLabel s) {
  switch (s) {
    case SegmentLabel::ContextSentence: return "sentence";
    case SegmentLabel::NodeC: return "nodeC";
    case SegmentLabel::EdgeText: return "edge";
    case SegmentLabel::NodeP: return "nodeP";
    case SegmentLabel::TypeTag: return "type";
    case SegmentLabel::SubQuestion: return "subq";
    case SegmentLabel::Marker: return "marker";
  }
  return "?";
}

namespace marker {
inline constexpr std::string_view kBos = "<bos>";
inline constexpr std::string_view kNodeC = "<nodeC>";
inline constexpr std::string_view kEdge = "<edge>";
inline constexpr std::string_view kNodeP = "<nodeP>";
inline constexpr std::string_view kType = "<type>";
inline constexpr std::string_view kSubq = "<subq>";
inline constexpr std::string_view kEos = "<eos>";
inline constexpr std::array<std::string_view, 7> kAll = {kBos, kNodeC, kEdge, kNodeP, kType, kSubq, kEos};
}  // namespace marker

struct GeneratorFields {
  std::string sentence;
  std::string child;
  std::string edge;
  std::string parent;
  EdgeDirection direction = EdgeDirection::ChildToParent;
  std::optional<RewriteType> rewrite_type;
  std::optional<std::string> subq;

  friend bool operator==(const GeneratorFields&, const GeneratorFields&) = default;
};

struct GeneratorInput {
  int step = 1;
  GeneratorFields fields;
  std::string text;
  std::vector<SegmentLabel> segments;  // one per whitespace token of `text`
};

// Surface plus every mention text (coreferent spellings included).
struct NodeView {
  std::string surface;
  std::vector<std::string> mentions;
};

inline NodeView node_view(const ContextGraph& g, NodeId n) {
  return NodeView{g.node(n).surface, g.mention_texts(n)};
}

inline bool contains_marker(std::string_view s) {
  for (auto m : marker::kAll)
    if (s.find(m) != std::string_view::npos) return true;
  return false;
}

inline std::string serialize(const GeneratorFields& f) {
  const bool child_first = f.direction == EdgeDirection::ChildToParent;
  std::string out;
  auto add = [&](std::string_view part) {
    if (!out.empty()) out += ' ';
    out += part;
  };
  add(marker::kBos);
  add(f.sentence);
  add(child_first ? marker::kNodeC : marker::kNodeP);
  add(child_first ? f.child : f.parent);
  add(marker::kEdge);
  add(f.edge);
  add(child_first ? marker::kNodeP : marker::kNodeC);
  add(child_first ? f.parent : f.child);
  if (f.rewrite_type) {
    add(marker::kType);
    add(to_string(*f.rewrite_type));
  }
  if (f.subq) {
    add(marker::kSubq);
    add(*f.subq);
  }
  add(marker::kEos);
  return out;
}

// Inverse of serialize() for marker-free fields.
inline GeneratorFields parse_generator_text(std::string_view text) {
  auto fail = [](const std::string& why) -> void {
    throw Error(ErrorCode::InvalidInput, "generator input: " + why);
  };
  for (auto m : marker::kAll) {
    auto first = text.find(m);
    if (first != std::string_view::npos && text.find(m, first + 1) != std::string_view::npos)
      fail("marker " + std::string(m) + " repeated");
  }
  if (!text.starts_with(marker::kBos)) fail("missing <bos>");
  auto pos_c = text.find(marker::kNodeC);
  auto pos_p = text.find(marker::kNodeP);
  if (pos_c == std::string_view::npos || pos_p == std::string_view::npos) fail("missing node markers");
  const bool child_first = pos_c < pos_p;

  std::vector<std::string_view> order = {marker::kBos, child_first ? marker::kNodeC : marker::kNodeP,
                                         marker::kEdge, child_first ? marker::kNodeP : marker::kNodeC};
  if (text.find(marker::kType) != std::string_view::npos) order.push_back(marker::kType);
  if (text.find(marker::kSubq) != std::string_view::npos) order.push_back(marker::kSubq);
  order.push_back(marker::kEos);

  std::vector<std::size_t> at;
  std::size_t from = 0;
  for (auto m : order) {
    auto p = text.find(m, from);
    if (p == std::string_view::npos) fail("marker " + std::string(m) + " missing or out of order");
    at.push_back(p);
    from = p + m.size();
  }
  if (at.back() + marker::kEos.size() != text.size()) fail("trailing text after <eos>");

  std::vector<std::string> values;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    std::size_t b = at[k] + order[k].size();
    std::size_t e = at[k + 1];
    if (e < b + 2 || text[b] != ' ' || text[e - 1] != ' ') fail("fields must be space separated");
    values.emplace_back(text.substr(b + 1, e - b - 2));
  }

  GeneratorFields f;
  f.direction = child_first ? EdgeDirection::ChildToParent : EdgeDirection::ParentToChild;
  f.sentence = values[0];
  (child_first ? f.child : f.parent) = values[1];
  f.edge = values[2];
  (child_first ? f.parent : f.child) = values[3];
  std::size_t k = 4;
  if (order[k] == marker::kType) f.rewrite_type = rewrite_type_from_string(values[k++]);
  if (order[k] == marker::kSubq) f.subq = values[k];
  return f;
}

namespace detail {

inline std::string match_key(std::string_view w) { return text::to_lower(text::strip_edge_punct(w)); }

// Marks tokens [first, last) that spell any of `phrases` (token-wise,
// case-insensitive, edge punctuation ignored).
inline void relabel_phrases(std::string_view text, const std::vector<text::Word>& toks, std::size_t first,
                            std::size_t last, const std::vector<std::string>& phrases,
                            std::vector<SegmentLabel>& labels) {
  std::vector<std::string> keys;
  for (std::size_t i = first; i < last; ++i)
    keys.push_back(match_key(text.substr(toks[i].begin, toks[i].end - toks[i].begin)));
  for (const auto& phrase : phrases) {
    std::vector<std::string> pk;
    for (const auto& w : text::split_ws(phrase)) {
      auto k = match_key(w);
      if (!k.empty()) pk.push_back(std::move(k));
    }
    if (pk.empty() || pk.size() > keys.size()) continue;
    for (std::size_t s = 0; s + pk.size() <= keys.size(); ++s) {
      if (std::equal(pk.begin(), pk.end(), keys.begin() + static_cast<std::ptrdiff_t>(s))) {
        for (std::size_t k = 0; k < pk.size(); ++k) labels[first + s + k] = SegmentLabel::NodeP;
      }
    }
  }
}

}  // namespace detail

// Labels every token of serialize(f); `parent_mentions` drive the NodeP
// relabeling inside the sentence and sub-question blocks.
inline std::vector<SegmentLabel> segment_labels(const GeneratorFields& f, std::string_view text,
                                                const std::vector<std::string>& parent_mentions) {
  auto toks = text::words(text);
  std::vector<SegmentLabel> labels(toks.size(), SegmentLabel::Marker);
  SegmentLabel current = SegmentLabel::Marker;
  std::size_t sentence_begin = 0, sentence_end = 0, subq_begin = 0, subq_end = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string_view tok = text.substr(toks[i].begin, toks[i].end - toks[i].begin);
    std::optional<SegmentLabel> next;
    if (tok == marker::kBos) next = SegmentLabel::ContextSentence;
    else if (tok == marker::kNodeC) next = SegmentLabel::NodeC;
    else if (tok == marker::kEdge) next = SegmentLabel::EdgeText;
    else if (tok == marker::kNodeP) next = SegmentLabel::NodeP;
    else if (tok == marker::kType) next = SegmentLabel::TypeTag;
    else if (tok == marker::kSubq) next = SegmentLabel::SubQuestion;
    else if (tok == marker::kEos) next = SegmentLabel::Marker;
    if (!next) {
      labels[i] = current;
      continue;
    }
    if (current == SegmentLabel::ContextSentence) sentence_end = i;
    if (current == SegmentLabel::SubQuestion) subq_end = i;
    if (*next == SegmentLabel::ContextSentence) sentence_begin = i + 1;
    if (*next == SegmentLabel::SubQuestion) subq_begin = i + 1;
    labels[i] = SegmentLabel::Marker;
    current = *next;
  }
  std::vector<std::string> phrases = parent_mentions;
  phrases.push_back(f.parent);
  detail::relabel_phrases(text, toks, sentence_begin, sentence_end, phrases, labels);
  if (subq_end > subq_begin)
    detail::relabel_phrases(text, toks, subq_begin, subq_end, phrases, labels);
  return labels;
}

namespace detail {

inline GeneratorInput assemble(GeneratorFields f, int step, const NodeView& parent) {
  for (const std::string* s : {&f.sentence, &f.child, &f.edge, &f.parent}) {
    if (contains_marker(*s))
      throw Error(ErrorCode::InvalidInput, "field contains a reserved marker: \"" + *s + "\"");
  }
  if (f.subq && contains_marker(*f.subq))
    throw Error(ErrorCode::InvalidInput, "sub-question contains a reserved marker");
  if (f.edge.empty()) throw Error(ErrorCode::InvalidInput, "missing chain edge");
  GeneratorInput in;
  in.step = step;
  in.text = serialize(f);
  in.segments = segment_labels(f, in.text, parent.mentions);
  in.fields = std::move(f);
  return in;
}

}  // namespace detail

inline GeneratorInput assemble_initial_input(const NodeView& n1, const NodeView& n0, std::string_view s1,
                                             std::string_view edge, EdgeDirection direction) {
  GeneratorFields f;
  f.sentence = std::string(s1);
  f.child = n1.surface;
  f.edge = std::string(edge);
  f.parent = n0.surface;
  f.direction = direction;
  return detail::assemble(std::move(f), 1, n0);
}

inline GeneratorInput assemble_rewrite_input(std::string_view q_prev, const NodeView& ni,
                                             const NodeView& parent, std::string_view si,
                                             std::string_view edge, EdgeDirection direction,
                                             RewriteType type, int step) {
  if (text::trim(q_prev).empty())
    throw Error(ErrorCode::InvalidInput, "rewrite step needs a non-empty previous question");
  if (step < 2) throw Error(ErrorCode::InvalidInput, "rewrite steps start at i=2");
  GeneratorFields f;
  f.sentence = std::string(si);
  f.child = ni.surface;
  f.edge = std::string(edge);
  f.parent = parent.surface;
  f.direction = direction;
  f.rewrite_type = type;
  f.subq = std::string(q_prev);
  return detail::assemble(std::move(f), step, parent);
}

}  // namespace hopqg
