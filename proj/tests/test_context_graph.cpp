#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "hopqg/context_graph.hpp"
#include "test_support.hpp"

using namespace hopqg;
using hopqg::testing::fixture_graph;
using hopqg::testing::load_fixture;

namespace {

NodeId by_surface(const ContextGraph& g, std::string_view s) {
  for (const auto& n : g.nodes())
    if (n.surface == s) return n.id;
  ADD_FAILURE() << "no node " << s;
  return NodeId{};
}

}  // namespace

TEST(ContextGraph, TripleBecomesTwoNodesAndOneEdge) {
  auto g = fixture_graph("fig2_context.json");
  NodeId apm = by_surface(g, "A Perfect Murder");
  NodeId film = by_surface(g, "a 1998 American crime film");
  bool found = false;
  for (const auto& e : g.edges())
    if (e.source == apm && e.target == film && e.relation == "is") found = true;
  EXPECT_TRUE(found);
}

TEST(ContextGraph, CorefMentionMergedIntoCanonicalNode) {
  auto g = fixture_graph("fig2_context.json");
  NodeId apm = by_surface(g, "A Perfect Murder");
  auto texts = g.mention_texts(apm);
  EXPECT_NE(std::find(texts.begin(), texts.end(), "It"), texts.end());
  for (const auto& n : g.nodes()) EXPECT_NE(n.surface, "It");
  // The remake edge hangs off the merged node.
  NodeId dial = by_surface(g, "Dial M for Murder");
  bool found = false;
  for (const auto& e : g.edges())
    if (e.source == apm && e.target == dial) found = (e.relation == "is a loose modern remake of");
  EXPECT_TRUE(found);
}

TEST(ContextGraph, EmptyTripleListGivesEmptyGraph) {
  AnnotatedContext ctx;
  ctx.context = "Nothing here.";
  ctx.sentences.push_back(Sentence{0, 0, 13, "Nothing here."});
  auto g = build_context_graph(ctx);
  EXPECT_TRUE(g.nodes().empty());
  EXPECT_TRUE(g.edges().empty());
}

TEST(ContextGraph, SpanOutOfBoundsNamesTriple) {
  auto j = load_fixture("fig1_context.json");
  j["triples"][3]["object"]["end"] = 100000;
  try {
    (void)context_from_json(j);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 3u);
  }
}

TEST(ContextGraph, CrossSentenceTripleRejected) {
  auto j = load_fixture("fig1_context.json");
  j["triples"][0]["object"] = j["triples"][1]["object"];
  EXPECT_THROW((void)context_from_json(j), Error);
}

TEST(ContextGraph, UndirectedDegree) {
  auto g = fixture_graph("fig1_context.json");
  EXPECT_EQ(undirected_degree(g, by_surface(g, "Top Gun")), 3u);
  EXPECT_EQ(undirected_degree(g, by_surface(g, "Syracuse")), 1u);
  EXPECT_THROW((void)undirected_degree(g, NodeId{999}), Error);
}

TEST(ContextGraph, StarCenterDegreeMatchesEdgeCount) {
  for (int k = 1; k <= 12; ++k) {
    AnnotatedContext ctx;
    for (int i = 0; i < k; ++i) {
      std::string leaf = "Leaf" + std::string(1, static_cast<char>('a' + i));
      std::string sent = "Hub links " + leaf + ".";
      std::size_t base = ctx.context.empty() ? 0 : ctx.context.size() + 1;
      if (!ctx.context.empty()) ctx.context += ' ';
      ctx.context += sent;
      auto s = static_cast<std::size_t>(i);
      ctx.sentences.push_back(Sentence{s, base, base + sent.size(), sent});
      ctx.triples.push_back(Triple{{s, base, base + 3}, {s, base + 4, base + 9}, {s, base + 10, base + 10 + leaf.size()}});
    }
    auto g = build_context_graph(ctx);
    NodeId hub = by_surface(g, "Hub");
    std::size_t brute = 0;
    for (const auto& e : g.edges()) brute += (e.source == hub) + (e.target == hub);
    EXPECT_EQ(undirected_degree(g, hub), brute);
    EXPECT_EQ(brute, static_cast<std::size_t>(k));
  }
}

TEST(ContextGraph, IsolatedNodeHasDegreeZero) {
  // Identical subject and object collapse to a self-loop, which is dropped.
  AnnotatedContext ctx;
  ctx.context = "Hub meets Hub.";
  ctx.sentences.push_back(Sentence{0, 0, 14, ctx.context});
  ctx.triples.push_back(Triple{{0, 0, 3}, {0, 4, 9}, {0, 10, 13}});
  auto g = build_context_graph(ctx);
  ASSERT_EQ(g.nodes().size(), 1u);
  EXPECT_EQ(undirected_degree(g, NodeId{0}), 0u);
  EXPECT_EQ(g.stats().self_loops_dropped, 1u);
}

TEST(ContextGraph, FindNodeExactAndOverlap) {
  auto g = fixture_graph("fig2_context.json");
  EXPECT_EQ(g.node(find_node(g, "Alfred Hitchcock")).surface, "Alfred Hitchcock");
  EXPECT_EQ(g.node(find_node(g, "Dial M for Murder")).surface, "Dial M for Murder");
  EXPECT_THROW((void)find_node(g, "zebra quantum"), Error);
}

TEST(ContextGraph, FindNodeMatchesTokenOverlapOracle) {
  auto g = fixture_graph("fig2_context.json");
  for (std::string q : {"Hitchcock film 1954", "Hitchcock", "Andrew", "murder perfect", "crime thriller",
                        "Davis Andrew"}) {
    // Oracle: exact normalized match else max content-word overlap over
    // mentions, lowest id on ties.
    std::optional<NodeId> exact;
    for (const auto& n : g.nodes()) {
      for (const auto& m : g.mention_texts(n.id))
        if (!exact && text::to_lower(m) == text::to_lower(q)) exact = n.id;
    }
    NodeId want{};
    if (exact) {
      want = *exact;
    } else {
      auto qw = text::content_words(q);
      std::size_t best = 0;
      for (const auto& n : g.nodes()) {
        for (const auto& m : g.mention_texts(n.id)) {
          auto mw = text::content_words(m);
          std::size_t ov = 0;
          for (const auto& w : qw) ov += std::count(mw.begin(), mw.end(), w) > 0;
          if (ov > best) {
            best = ov;
            want = n.id;
          }
        }
      }
      ASSERT_GT(best, 0u) << q;
    }
    EXPECT_EQ(find_node(g, q), want) << q;
  }
}

TEST(ContextGraph, FindNodePrefersHigherOverlap) {
  auto lines = hopqg::testing::load_fixture_lines("star_contexts.jsonl");
  auto g = build_context_graph(context_from_json(lines.at(1)));
  EXPECT_EQ(g.node(find_node(g, "Hitchcock film 1954")).surface, "Alfred Hitchcock");
}

TEST(ContextGraph, NodeCountNeverGrowsUnderMerge) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto ctx = hopqg::testing::random_context(5 + seed % 20, seed % 7, seed);
    auto g = build_context_graph(ctx);
    EXPECT_LE(g.nodes().size(), 2 * ctx.triples.size());
    const auto& st = g.stats();
    EXPECT_EQ(st.triples, g.edges().size() + st.self_loops_dropped + st.duplicates_dropped);
    for (const auto& e : g.edges()) {
      EXPECT_NE(e.source, e.target);
      EXPECT_EQ(e.sentence_index, ctx.triples[e.triple_index].subject.sentence);
    }
  }
}

TEST(ContextGraph, Deterministic) {
  auto a = graph_to_json(fixture_graph("fig1_context.json"));
  auto b = graph_to_json(fixture_graph("fig1_context.json"));
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(ContextGraph, NamedEntityFlagsAndLinks) {
  auto g = fixture_graph("fig1_context.json");
  EXPECT_TRUE(g.node(by_surface(g, "Tom Cruise")).is_named_entity);
  EXPECT_EQ(g.node(by_surface(g, "Tom Cruise")).ne_type, "PERSON");
  const auto& film = g.node(by_surface(g, "a 1986 action film"));
  EXPECT_FALSE(film.is_named_entity);
  ASSERT_TRUE(film.entity_link.has_value());
  EXPECT_EQ(g.node(*film.entity_link).surface, "Top Gun");
}
