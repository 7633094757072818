#pragma once

// Reasoning-chain planning: pick the answer node, take a breadth-first
// spanning tree rooted at it, prune to d+1 nodes favouring sentence coverage,
// index the survivors in preorder and assign Bridge/Intersection rewrite types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hopqg/context_graph.hpp"
#include "hopqg/error.hpp"

namespace hopqg {

enum class RewriteType { Bridge, Intersection };

// ChildToParent: the chain child N_i is the edge's source (N_i -> N_P(i)).
enum class EdgeDirection { ChildToParent, ParentToChild };

inline std::string_view to_string(RewriteType t) {
  return t == RewriteType::Bridge ? "Bridge" : "Intersection";
}

inline std::string_view to_string(EdgeDirection d) {
  return d == EdgeDirection::ChildToParent ? "child_to_parent" : "parent_to_child";
}

inline RewriteType rewrite_type_from_string(std::string_view s) {
  if (text::iequals(s, "bridge")) return RewriteType::Bridge;
  if (text::iequals(s, "intersection")) return RewriteType::Intersection;
  throw Error(ErrorCode::InvalidInput, "unknown rewrite type \"" + std::string(s) + "\"");
}

inline EdgeDirection edge_direction_from_string(std::string_view s) {
  if (s == "child_to_parent") return EdgeDirection::ChildToParent;
  if (s == "parent_to_child") return EdgeDirection::ParentToChild;
  throw Error(ErrorCode::InvalidInput, "unknown edge direction \"" + std::string(s) + "\"");
}

class DifficultyLevel {
 public:
  explicit DifficultyLevel(int hops) : hops_(hops) {
    if (hops < 1) throw Error(ErrorCode::InvalidInput, "difficulty level must be >= 1");
  }
  int hops() const { return hops_; }

 private:
  int hops_;
};

struct ChainNode {
  int index = 0;
  NodeId node;
  std::optional<int> parent;
  // Absent for the root.
  std::optional<std::size_t> edge;
  std::string edge_text;
  EdgeDirection direction = EdgeDirection::ChildToParent;
  std::optional<std::size_t> source_sentence;
  std::optional<RewriteType> rewrite_type;
};

struct ReasoningChain {
  std::vector<ChainNode> nodes;

  NodeId answer() const { return nodes.front().node; }
  int d() const { return static_cast<int>(nodes.size()) - 1; }
};

struct TreeNode {
  NodeId node;
  std::optional<std::size_t> parent;  // position in SpanningTree::nodes
  std::optional<std::size_t> edge;    // index into ContextGraph::edges()
};

// Breadth-first order; nodes[0] is the root and parent positions precede
// their children.
struct SpanningTree {
  std::vector<TreeNode> nodes;

  std::size_t size() const { return nodes.size(); }
};

// A node is eligible as answer when it is, or is adjacent to, a named entity
// and has undirected degree > 1.
inline std::vector<NodeId> eligible_answer_nodes(const ContextGraph& g) {
  std::vector<NodeId> out;
  for (const auto& n : g.nodes()) {
    if (undirected_degree(g, n.id) <= 1) continue;
    bool linked = n.is_named_entity;
    for (std::size_t ei : g.incident(n.id)) {
      if (linked) break;
      linked = g.node(g.edges()[ei].other(n.id)).is_named_entity;
    }
    if (linked) out.push_back(n.id);
  }
  return out;
}

inline NodeId sample_answer_node(const ContextGraph& g, std::uint64_t seed) {
  auto eligible = eligible_answer_nodes(g);
  if (eligible.empty())
    throw Error(ErrorCode::Planning, "no node is a named entity (or linked to one) with degree > 1");
  std::mt19937_64 rng(seed);
  return eligible[rng() % eligible.size()];
}

namespace detail {

// (sentence, neighbour surface, edge index) ordering of a node's edges.
inline std::vector<std::size_t> ordered_incident(const ContextGraph& g, NodeId n) {
  std::vector<std::size_t> es = g.incident(n);
  std::sort(es.begin(), es.end(), [&](std::size_t a, std::size_t b) {
    const Edge& ea = g.edges()[a];
    const Edge& eb = g.edges()[b];
    return std::forward_as_tuple(ea.sentence_index, g.node(ea.other(n)).surface, a) <
           std::forward_as_tuple(eb.sentence_index, g.node(eb.other(n)).surface, b);
  });
  return es;
}

}  // namespace detail

// With unit edge weights every spanning tree is maximal; BFS keeps it shallow.
inline SpanningTree spanning_tree(const ContextGraph& g, NodeId root) {
  if (!g.contains(root)) throw Error(ErrorCode::NotFound, "unknown root node");
  SpanningTree tree;
  std::vector<bool> seen(g.nodes().size(), false);
  seen[root.value] = true;
  tree.nodes.push_back({root, std::nullopt, std::nullopt});
  for (std::size_t head = 0; head < tree.nodes.size(); ++head) {
    NodeId u = tree.nodes[head].node;
    for (std::size_t ei : detail::ordered_incident(g, u)) {
      NodeId v = g.edges()[ei].other(u);
      if (seen[v.value]) continue;
      seen[v.value] = true;
      tree.nodes.push_back({v, head, ei});
    }
  }
  return tree;
}

// R_i = Bridge iff N_i is the first (lowest preorder) child of its parent.
inline void assign_rewrite_types(ReasoningChain& chain) {
  std::map<int, int> first_child;
  for (const auto& n : chain.nodes) {
    if (n.parent && !first_child.count(*n.parent)) first_child[*n.parent] = n.index;
  }
  for (auto& n : chain.nodes) {
    if (n.index < 2) {
      n.rewrite_type.reset();
      continue;
    }
    n.rewrite_type = first_child.at(*n.parent) == n.index ? RewriteType::Bridge : RewriteType::Intersection;
  }
}

// Keeps the root plus d nodes. Each step adds the frontier node whose source
// sentence is not yet covered, preferring earlier sentences, then surface.
inline ReasoningChain prune(const ContextGraph& g, const SpanningTree& tree, DifficultyLevel level) {
  const int d = level.hops();
  if (tree.size() < static_cast<std::size_t>(d) + 1) {
    int max_d = static_cast<int>(tree.size()) - 1;
    throw InsufficientContextError("context supports at most d=" + std::to_string(max_d) +
                                       ", requested d=" + std::to_string(d),
                                   max_d);
  }
  std::vector<std::vector<std::size_t>> children(tree.size());
  for (std::size_t p = 1; p < tree.size(); ++p) children[*tree.nodes[p].parent].push_back(p);

  auto sentence_of = [&](std::size_t p) { return g.edges()[*tree.nodes[p].edge].sentence_index; };
  auto surface_of = [&](std::size_t p) -> const std::string& { return g.node(tree.nodes[p].node).surface; };

  std::vector<std::size_t> kept = {0};
  std::set<std::size_t> covered;
  std::vector<std::size_t> frontier = children[0];
  while (kept.size() < static_cast<std::size_t>(d) + 1) {
    auto best = std::min_element(frontier.begin(), frontier.end(), [&](std::size_t a, std::size_t b) {
      int gain_a = covered.count(sentence_of(a)) ? 0 : 1;
      int gain_b = covered.count(sentence_of(b)) ? 0 : 1;
      return std::forward_as_tuple(-gain_a, sentence_of(a), surface_of(a), tree.nodes[a].node) <
             std::forward_as_tuple(-gain_b, sentence_of(b), surface_of(b), tree.nodes[b].node);
    });
    std::size_t pick = *best;
    frontier.erase(best);
    kept.push_back(pick);
    covered.insert(sentence_of(pick));
    frontier.insert(frontier.end(), children[pick].begin(), children[pick].end());
  }

  std::set<std::size_t> kept_set(kept.begin(), kept.end());
  std::vector<std::vector<std::size_t>> kept_children(tree.size());
  for (std::size_t p : kept) {
    if (p != 0) kept_children[*tree.nodes[p].parent].push_back(p);
  }
  for (auto& ch : kept_children) {
    std::sort(ch.begin(), ch.end(), [&](std::size_t a, std::size_t b) {
      return std::forward_as_tuple(sentence_of(a), surface_of(a), tree.nodes[a].node) <
             std::forward_as_tuple(sentence_of(b), surface_of(b), tree.nodes[b].node);
    });
  }

  ReasoningChain chain;
  std::vector<std::pair<std::size_t, std::optional<int>>> stack = {{0, std::nullopt}};
  while (!stack.empty()) {
    auto [p, parent_index] = stack.back();
    stack.pop_back();
    ChainNode cn;
    cn.index = static_cast<int>(chain.nodes.size());
    cn.node = tree.nodes[p].node;
    cn.parent = parent_index;
    if (tree.nodes[p].edge) {
      const Edge& e = g.edges()[*tree.nodes[p].edge];
      cn.edge = *tree.nodes[p].edge;
      cn.edge_text = e.relation;
      cn.direction = e.source == cn.node ? EdgeDirection::ChildToParent : EdgeDirection::ParentToChild;
      cn.source_sentence = e.sentence_index;
    }
    chain.nodes.push_back(cn);
    const auto& ch = kept_children[p];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back({*it, cn.index});
  }
  assign_rewrite_types(chain);
  return chain;
}

// The sentence the chain node's edge was extracted from.
inline const Sentence& context_sentence(const ContextGraph& g, const ChainNode& n) {
  if (!n.edge) throw Error(ErrorCode::InvalidInput, "the root node has no context sentence");
  return g.context().sentences.at(g.edges().at(*n.edge).sentence_index);
}

inline ReasoningChain plan_chain(const ContextGraph& g, DifficultyLevel d, std::uint64_t seed,
                                 std::optional<NodeId> answer = std::nullopt) {
  NodeId root = answer ? *answer : sample_answer_node(g, seed);
  return prune(g, spanning_tree(g, root), d);
}

// Structural checks shared by tests and the CLI when a plan is read back.
inline std::vector<std::string> chain_violations(const ContextGraph& g, const ReasoningChain& chain) {
  std::vector<std::string> out;
  if (chain.nodes.empty()) {
    out.push_back("empty chain");
    return out;
  }
  std::set<NodeId> distinct;
  std::map<int, int> first_child;
  for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
    const ChainNode& n = chain.nodes[i];
    const std::string at = "node " + std::to_string(i) + ": ";
    if (n.index != static_cast<int>(i)) out.push_back(at + "index out of order");
    if (!g.contains(n.node)) {
      out.push_back(at + "unknown graph node");
      continue;
    }
    distinct.insert(n.node);
    if (i == 0) {
      if (n.parent || n.edge) out.push_back(at + "root must have no parent or edge");
      continue;
    }
    if (!n.parent || *n.parent >= n.index || *n.parent < 0) {
      out.push_back(at + "parent must precede child");
      continue;
    }
    if (!first_child.count(*n.parent)) first_child[*n.parent] = n.index;
    if (!n.edge || *n.edge >= g.edges().size()) {
      out.push_back(at + "edge missing from graph");
      continue;
    }
    const Edge& e = g.edges()[*n.edge];
    NodeId parent_node = chain.nodes[*n.parent].node;
    bool forward = e.source == n.node && e.target == parent_node;
    bool backward = e.source == parent_node && e.target == n.node;
    if (!forward && !backward) out.push_back(at + "edge does not join node and parent");
    if ((n.direction == EdgeDirection::ChildToParent) != forward)
      out.push_back(at + "edge direction mismatch");
    if (e.relation != n.edge_text) out.push_back(at + "relation text mismatch");
    if (n.source_sentence != e.sentence_index) out.push_back(at + "sentence provenance mismatch");
    if (i >= 2) {
      auto want = first_child[*n.parent] == n.index ? RewriteType::Bridge : RewriteType::Intersection;
      if (n.rewrite_type != want) out.push_back(at + "rewrite type violates first-child rule");
    } else if (n.rewrite_type) {
      out.push_back(at + "rewrite type set on node 1");
    }
  }
  if (distinct.size() != chain.nodes.size()) out.push_back("chain repeats a graph node");
  return out;
}

inline nlohmann::json chain_to_json(const ContextGraph& g, const ReasoningChain& chain) {
  nlohmann::json j;
  j["answer_node"] = chain.answer().value;
  j["answer"] = g.node(chain.answer()).surface;
  j["d"] = chain.d();
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : chain.nodes) {
    nlohmann::json nj{{"i", n.index}, {"node", n.node.value}, {"surface", g.node(n.node).surface}};
    nj["parent"] = n.parent ? nlohmann::json(*n.parent) : nlohmann::json(nullptr);
    nj["edge"] = n.edge ? nlohmann::json(n.edge_text) : nlohmann::json(nullptr);
    nj["edge_index"] = n.edge ? nlohmann::json(*n.edge) : nlohmann::json(nullptr);
    nj["edge_dir"] = n.edge ? nlohmann::json(to_string(n.direction)) : nlohmann::json(nullptr);
    nj["sentence"] = n.source_sentence ? nlohmann::json(*n.source_sentence) : nlohmann::json(nullptr);
    nj["rewrite_type"] = n.rewrite_type ? nlohmann::json(to_string(*n.rewrite_type)) : nlohmann::json(nullptr);
    j["nodes"].push_back(std::move(nj));
  }
  return j;
}

// Reads a plan back against the graph it was made from; rejects plans whose
// edges or shape do not match.
inline ReasoningChain chain_from_json(const ContextGraph& g, const nlohmann::json& j) {
  ReasoningChain chain;
  try {
    for (const auto& nj : j.at("nodes")) {
      ChainNode n;
      n.index = nj.at("i").get<int>();
      n.node = NodeId{nj.at("node").get<std::uint32_t>()};
      if (!nj.at("parent").is_null()) n.parent = nj.at("parent").get<int>();
      if (!nj.at("edge_index").is_null()) n.edge = nj.at("edge_index").get<std::size_t>();
      if (!nj.at("edge").is_null()) n.edge_text = nj.at("edge").get<std::string>();
      if (!nj.at("edge_dir").is_null())
        n.direction = edge_direction_from_string(nj.at("edge_dir").get<std::string>());
      if (!nj.at("sentence").is_null()) n.source_sentence = nj.at("sentence").get<std::size_t>();
      if (!nj.at("rewrite_type").is_null())
        n.rewrite_type = rewrite_type_from_string(nj.at("rewrite_type").get<std::string>());
      chain.nodes.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("chain plan schema: ") + e.what());
  }
  auto problems = chain_violations(g, chain);
  if (!problems.empty()) throw Error(ErrorCode::InvalidInput, "chain plan: " + problems.front());
  if (j.contains("d") && j.at("d").get<int>() != chain.d())
    throw Error(ErrorCode::InvalidInput, "chain plan: d does not match node count");
  return chain;
}

}  // namespace hopqg
