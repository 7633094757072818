#pragma once

// Context graph: OpenIE triples become subject/object nodes joined by a
// directed relation edge; coreferent and identically-named mentions collapse
// into one node. A built graph is immutable.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hopqg/context.hpp"
#include "hopqg/error.hpp"
#include "hopqg/squad.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct Node {
  NodeId id;
  std::string surface;
  std::vector<Span> mentions;
  bool is_named_entity = false;
  std::string ne_type;
  std::optional<NodeId> entity_link;
};

struct Edge {
  NodeId source;
  NodeId target;
  std::string relation;
  std::size_t sentence_index = 0;
  std::size_t triple_index = 0;

  NodeId other(NodeId n) const { return n == source ? target : source; }
};

struct GraphBuildStats {
  std::size_t triples = 0;
  std::size_t nodes_before_merge = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

class ContextGraph {
 public:
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const AnnotatedContext& context() const { return *context_; }
  std::shared_ptr<const AnnotatedContext> context_ptr() const { return context_; }
  const GraphBuildStats& stats() const { return stats_; }

  bool contains(NodeId n) const { return n.value < nodes_.size(); }

  const Node& node(NodeId n) const {
    require(n);
    return nodes_[n.value];
  }

  // Indices into edges() touching `n`, in edge order.
  const std::vector<std::size_t>& incident(NodeId n) const {
    require(n);
    return incident_[n.value];
  }

  std::vector<std::string> mention_texts(NodeId n) const {
    std::vector<std::string> out;
    for (const auto& m : node(n).mentions) {
      std::string t(context_->slice(m));
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
    }
    return out;
  }

 private:
  void require(NodeId n) const {
    if (!contains(n))
      throw Error(ErrorCode::NotFound, "unknown node " + std::to_string(n.value));
  }

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  std::shared_ptr<const AnnotatedContext> context_;
  GraphBuildStats stats_;

  friend ContextGraph build_context_graph(AnnotatedContext ctx);
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // Smaller root wins so component order follows first occurrence.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

inline std::string surface_key(std::string_view s) {
  return text::join(text::split_ws(text::to_lower(text::strip_edge_punct(text::trim(s)))), " ");
}

inline bool is_connector(std::string_view w) {
  static const std::set<std::string, std::less<>> kConnectors = {
      "of", "for", "and", "the", "de", "la", "le", "von", "van", "in",
      "on", "at",  "to",  "a",   "an", "du", "del", "da", "&"};
  return kConnectors.count(text::to_lower(w)) > 0;
}

// Capitalized token run (connectors allowed inside) that is not just a
// sentence-initial capital.
inline bool looks_like_named_entity(std::string_view mention, bool sentence_initial) {
  if (text::is_pronoun(mention)) return false;
  auto toks = text::split_ws(mention);
  if (!toks.empty() && (text::iequals(toks.front(), "the") || text::iequals(toks.front(), "a") ||
                        text::iequals(toks.front(), "an"))) {
    toks.erase(toks.begin());
    sentence_initial = false;
  }
  if (toks.empty()) return false;
  if (!text::is_capitalized(toks.front()) || !text::is_capitalized(toks.back())) return false;
  std::size_t caps = 0;
  for (const auto& t : toks) {
    if (text::is_capitalized(t)) {
      ++caps;
    } else if (!is_connector(text::strip_edge_punct(t))) {
      return false;
    }
  }
  return !(caps == 1 && sentence_initial);
}

}  // namespace detail

inline ContextGraph build_context_graph(AnnotatedContext ctx) {
  validate(ctx);
  ContextGraph g;
  auto shared = std::make_shared<const AnnotatedContext>(std::move(ctx));
  g.context_ = shared;
  const AnnotatedContext& c = *shared;

  const std::size_t n_occ = c.triples.size() * 2;
  auto occ_span = [&](std::size_t o) -> const Span& {
    const Triple& t = c.triples[o / 2];
    return o % 2 == 0 ? t.subject : t.object;
  };

  detail::DisjointSets sets(n_occ);
  std::map<std::string, std::size_t> by_surface;
  for (std::size_t o = 0; o < n_occ; ++o) {
    auto text = c.slice(occ_span(o));
    if (text::is_pronoun(text)) continue;
    auto [it, inserted] = by_surface.emplace(detail::surface_key(text), o);
    if (!inserted) sets.unite(it->second, o);
  }
  // occurrence -> clusters it falls in
  std::vector<std::vector<std::size_t>> occ_clusters(n_occ);
  for (std::size_t ci = 0; ci < c.coref_clusters.size(); ++ci) {
    std::optional<std::size_t> first;
    for (std::size_t o = 0; o < n_occ; ++o) {
      bool in_cluster = std::any_of(c.coref_clusters[ci].mentions.begin(),
                                    c.coref_clusters[ci].mentions.end(),
                                    [&](const Span& m) { return m.contains(occ_span(o)); });
      if (!in_cluster) continue;
      occ_clusters[o].push_back(ci);
      if (first) {
        sets.unite(*first, o);
      } else {
        first = o;
      }
    }
  }

  std::map<std::size_t, std::uint32_t> root_to_node;
  std::vector<std::uint32_t> occ_node(n_occ);
  std::vector<std::set<std::size_t>> node_clusters;
  for (std::size_t o = 0; o < n_occ; ++o) {
    std::size_t r = sets.find(o);
    auto [it, inserted] = root_to_node.emplace(r, static_cast<std::uint32_t>(g.nodes_.size()));
    if (inserted) {
      Node n;
      n.id = NodeId{it->second};
      g.nodes_.push_back(std::move(n));
      node_clusters.emplace_back();
    }
    occ_node[o] = it->second;
    Node& node = g.nodes_[it->second];
    node.mentions.push_back(occ_span(o));
    for (std::size_t ci : occ_clusters[o]) node_clusters[it->second].insert(ci);
  }

  for (std::size_t ni = 0; ni < g.nodes_.size(); ++ni) {
    Node& node = g.nodes_[ni];
    for (std::size_t ci : node_clusters[ni])
      for (const auto& m : c.coref_clusters[ci].mentions) node.mentions.push_back(m);
    std::sort(node.mentions.begin(), node.mentions.end());
    node.mentions.erase(std::unique(node.mentions.begin(), node.mentions.end()), node.mentions.end());
    node.surface = std::string(c.slice(node.mentions[canonical_mention(c, node.mentions)]));

    if (c.named_entities) {
      for (const auto& ne : *c.named_entities) {
        bool hit = std::any_of(node.mentions.begin(), node.mentions.end(), [&](const Span& m) {
          if (m.sentence != ne.span.sentence) return false;
          if (!m.contains(ne.span) && !ne.span.contains(m)) return false;
          if (text::is_pronoun(c.slice(m))) return false;
          return text::content_words(c.slice(m)) == text::content_words(c.slice(ne.span));
        });
        if (hit) {
          node.is_named_entity = true;
          node.ne_type = ne.type;
          break;
        }
      }
    } else {
      node.is_named_entity = std::any_of(node.mentions.begin(), node.mentions.end(), [&](const Span& m) {
        bool initial = m.start == c.sentences[m.sentence].char_start;
        return detail::looks_like_named_entity(c.slice(m), initial);
      });
    }
  }

  g.stats_.triples = c.triples.size();
  g.stats_.nodes_before_merge = n_occ;
  g.incident_.assign(g.nodes_.size(), {});
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::string>> seen;
  for (std::size_t t = 0; t < c.triples.size(); ++t) {
    std::uint32_t s = occ_node[2 * t], o = occ_node[2 * t + 1];
    if (s == o) {
      ++g.stats_.self_loops_dropped;
      continue;
    }
    std::string rel(c.slice(c.triples[t].relation));
    if (!seen.emplace(s, o, rel).second) {
      ++g.stats_.duplicates_dropped;
      continue;
    }
    std::size_t ei = g.edges_.size();
    g.edges_.push_back(Edge{NodeId{s}, NodeId{o}, std::move(rel), c.triples[t].subject.sentence, t});
    g.incident_[s].push_back(ei);
    g.incident_[o].push_back(ei);
  }

  for (auto& node : g.nodes_) {
    if (node.is_named_entity) continue;
    for (std::size_t ei : g.incident_[node.id.value]) {
      NodeId other = g.edges_[ei].other(node.id);
      if (g.nodes_[other.value].is_named_entity &&
          (!node.entity_link || other < *node.entity_link)) {
        node.entity_link = other;
      }
    }
  }
  return g;
}

inline std::size_t undirected_degree(const ContextGraph& g, NodeId n) { return g.incident(n).size(); }

// Exact (normalized) mention match first, then highest content-word overlap
// with any single mention; lowest id wins ties.
inline NodeId find_node(const ContextGraph& g, std::string_view answer_text) {
  const std::string want = normalize_answer(answer_text);
  if (!want.empty()) {
    for (const auto& node : g.nodes()) {
      if (normalize_answer(node.surface) == want) return node.id;
      for (const auto& m : g.mention_texts(node.id))
        if (!text::is_pronoun(m) && normalize_answer(m) == want) return node.id;
    }
  }
  auto q = text::content_words(answer_text);
  std::set<std::string> query(q.begin(), q.end());
  std::optional<NodeId> best;
  std::size_t best_overlap = 0;
  for (const auto& node : g.nodes()) {
    std::size_t overlap = 0;
    for (const auto& m : g.mention_texts(node.id)) {
      auto mw = text::content_words(m);
      std::set<std::string> ms(mw.begin(), mw.end());
      std::size_t k = 0;
      for (const auto& w : ms) k += query.count(w);
      overlap = std::max(overlap, k);
    }
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = node.id;
    }
  }
  if (!best)
    throw Error(ErrorCode::NotFound, "no graph node matches \"" + std::string(answer_text) + "\"");
  return *best;
}

inline nlohmann::json graph_to_json(const ContextGraph& g) {
  const auto& c = g.context();
  nlohmann::json j;
  if (!c.id.empty()) j["id"] = c.id;
  j["sentences"] = nlohmann::json::array();
  for (const auto& s : c.sentences) j["sentences"].push_back(s.text);
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : g.nodes()) {
    nlohmann::json nj{{"id", n.id.value},
                      {"surface", n.surface},
                      {"named_entity", n.is_named_entity},
                      {"degree", undirected_degree(g, n.id)}};
    if (!n.ne_type.empty()) nj["ne_type"] = n.ne_type;
    nj["entity_link"] = n.entity_link ? nlohmann::json(n.entity_link->value) : nlohmann::json(nullptr);
    nj["mentions"] = nlohmann::json::array();
    for (const auto& m : n.mentions) {
      auto mj = span_to_json(m);
      mj["text"] = std::string(c.slice(m));
      nj["mentions"].push_back(std::move(mj));
    }
    j["nodes"].push_back(std::move(nj));
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({{"source", e.source.value},
                          {"target", e.target.value},
                          {"relation", e.relation},
                          {"sentence", e.sentence_index},
                          {"triple", e.triple_index}});
  }
  const auto& st = g.stats();
  j["stats"] = {{"triples", st.triples},
                {"nodes_before_merge", st.nodes_before_merge},
                {"self_loops_dropped", st.self_loops_dropped},
                {"duplicates_dropped", st.duplicates_dropped}};
  return j;
}

}  // namespace hopqg
