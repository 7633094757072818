#pragma once

// Two-hop record -> (R, Q_1, A_1, S_1, S_2, chain) training tuples. Records
// that fail a stage are skipped with a fixed reason code; the build never
// aborts on a single record.

#include <array>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hopqg/chain_planner.hpp"
#include "hopqg/context_graph.hpp"
#include "hopqg/error.hpp"
#include "hopqg/hotpot.hpp"
#include "hopqg/http_client.hpp"
#include "hopqg/jsonl.hpp"
#include "hopqg/squad.hpp"
#include "hopqg/worker_pool.hpp"

namespace hopqg {

enum class SkipReason { TypeFiltered, DecomposeFailed, QaFailed, AnswerMismatch, NodeUnfound, NoOverlap, BackendError, InvalidRecord };

inline constexpr std::array<SkipReason, 8> kSkipReasons = {
    SkipReason::TypeFiltered, SkipReason::DecomposeFailed, SkipReason::QaFailed,     SkipReason::AnswerMismatch,
    SkipReason::NodeUnfound,  SkipReason::NoOverlap,       SkipReason::BackendError, SkipReason::InvalidRecord};

inline std::string_view to_string(SkipReason r) {
  switch (r) {
    case SkipReason::TypeFiltered: return "type-filtered";
    case SkipReason::DecomposeFailed: return "decompose-failed";
    case SkipReason::QaFailed: return "qa-failed";
    case SkipReason::AnswerMismatch: return "answer-mismatch";
    case SkipReason::NodeUnfound: return "node-unfound";
    case SkipReason::NoOverlap: return "no-overlap";
    case SkipReason::BackendError: return "backend-error";
    case SkipReason::InvalidRecord: return "invalid-record";
  }
  return "?";
}

template <class T>
struct Sourced {
  T value;
  std::string source;
};

class TypeClassifier {
 public:
  virtual ~TypeClassifier() = default;
  virtual Sourced<ReasoningType> classify(const std::string& question) = 0;
};

class Decomposer {
 public:
  virtual ~Decomposer() = default;
  virtual std::optional<Sourced<Decomposition>> decompose(const std::string& question, ReasoningType type) = 0;
};

class SingleHopQa {
 public:
  virtual ~SingleHopQa() = default;
  virtual Sourced<std::string> answer(const std::string& question, const std::vector<std::string>& sentences) = 0;
};

class RuleTypeClassifier : public TypeClassifier {
 public:
  Sourced<ReasoningType> classify(const std::string& q) override { return {rule_classify(q), "rule"}; }
};

class RuleDecomposer : public Decomposer {
 public:
  std::optional<Sourced<Decomposition>> decompose(const std::string& q, ReasoningType t) override {
    auto d = rule_decompose(q, t);
    if (!d) return std::nullopt;
    return Sourced<Decomposition>{std::move(*d), "rule"};
  }
};

class RuleQa : public SingleHopQa {
 public:
  Sourced<std::string> answer(const std::string& q, const std::vector<std::string>& s) override {
    return {rule_answer(q, s), "rule"};
  }
};

class RemoteTypeClassifier : public TypeClassifier {
 public:
  explicit RemoteTypeClassifier(JsonClient c) : client_(std::move(c)) {}
  Sourced<ReasoningType> classify(const std::string& q) override {
    return {reasoning_type_from_string(client_.post_for_string({{"question", q}}, "label")), "remote"};
  }

 private:
  JsonClient client_;
};

class RemoteDecomposer : public Decomposer {
 public:
  explicit RemoteDecomposer(JsonClient c) : client_(std::move(c)) {}
  std::optional<Sourced<Decomposition>> decompose(const std::string& q, ReasoningType) override {
    auto j = client_.post({{"question", q}});
    if (!j.contains("subq1") || !j.contains("subq2") || !j["subq1"].is_string() || !j["subq2"].is_string())
      throw Error(ErrorCode::Backend, "decomposer response lacks subq1/subq2");
    Decomposition d{j["subq1"].get<std::string>(), j["subq2"].get<std::string>()};
    if (text::trim(d.subq1).empty() || text::trim(d.subq2).empty()) return std::nullopt;
    return Sourced<Decomposition>{std::move(d), "remote"};
  }

 private:
  JsonClient client_;
};

class RemoteQaService : public SingleHopQa {
 public:
  explicit RemoteQaService(JsonClient c) : client_(std::move(c)) {}
  Sourced<std::string> answer(const std::string& q, const std::vector<std::string>& s) override {
    return {client_.post_for_string({{"question", q}, {"context", text::join(s, " ")}}, "answer"), "remote"};
  }

 private:
  JsonClient client_;
};

// Remote first; on a backend failure the rule stand-in answers instead.
template <class Iface, class Remote, class Rule>
class WithFallback : public Iface {
 public:
  explicit WithFallback(JsonClient c) : remote_(std::move(c)) {}

 protected:
  Remote remote_;
  Rule rule_;
};

class FallbackTypeClassifier : public WithFallback<TypeClassifier, RemoteTypeClassifier, RuleTypeClassifier> {
 public:
  using WithFallback::WithFallback;
  Sourced<ReasoningType> classify(const std::string& q) override {
    try {
      return remote_.classify(q);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Backend) throw;
      auto r = rule_.classify(q);
      r.source = "rule-fallback";
      return r;
    }
  }
};

class FallbackDecomposer : public WithFallback<Decomposer, RemoteDecomposer, RuleDecomposer> {
 public:
  using WithFallback::WithFallback;
  std::optional<Sourced<Decomposition>> decompose(const std::string& q, ReasoningType t) override {
    try {
      return remote_.decompose(q, t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Backend) throw;
      auto r = rule_.decompose(q, t);
      if (r) r->source = "rule-fallback";
      return r;
    }
  }
};

class FallbackQa : public WithFallback<SingleHopQa, RemoteQaService, RuleQa> {
 public:
  using WithFallback::WithFallback;
  Sourced<std::string> answer(const std::string& q, const std::vector<std::string>& s) override {
    try {
      return remote_.answer(q, s);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Backend) throw;
      auto r = rule_.answer(q, s);
      r.source = "rule-fallback";
      return r;
    }
  }
};

struct BackendSpec {
  std::string kind = "rule";  // rule | remote
  std::string endpoint;
  bool fallback = true;
};

struct BackendSuiteConfig {
  BackendSpec type_classifier;
  BackendSpec decomposer;
  BackendSpec qa;
  int concurrency = 8;
  HttpOptions http;
};

inline BackendSpec backend_spec_from_json(const nlohmann::json& j) {
  BackendSpec s;
  s.kind = j.value("kind", std::string("rule"));
  s.endpoint = j.value("endpoint", std::string{});
  s.fallback = j.value("fallback", true);
  if (s.kind != "rule" && s.kind != "remote")
    throw Error(ErrorCode::InvalidInput, "backend kind must be rule or remote, got " + s.kind);
  return s;
}

struct BackendSuite {
  std::unique_ptr<TypeClassifier> type_classifier;
  std::unique_ptr<Decomposer> decomposer;
  std::unique_ptr<SingleHopQa> qa;
};

// Fails before any record is processed when a remote backend has no endpoint
// and no fallback.
inline BackendSuite resolve_backends(const BackendSuiteConfig& cfg) {
  auto limiter = std::make_shared<RequestLimiter>(cfg.concurrency);
  auto client = [&](const BackendSpec& s, const char* what) {
    if (s.endpoint.empty())
      throw Error(ErrorCode::InvalidInput, std::string(what) + ": remote backend has no endpoint");
    return JsonClient(parse_endpoint(s.endpoint), cfg.http, limiter);
  };
  auto remote_usable = [](const BackendSpec& s, const char* what) {
    if (s.kind != "remote") return false;
    if (!s.endpoint.empty()) return true;
    if (!s.fallback)
      throw Error(ErrorCode::InvalidInput, std::string(what) + ": remote backend has no endpoint and no fallback");
    return false;
  };
  BackendSuite suite;
  if (remote_usable(cfg.type_classifier, "type_classifier")) {
    auto c = client(cfg.type_classifier, "type_classifier");
    if (cfg.type_classifier.fallback) suite.type_classifier = std::make_unique<FallbackTypeClassifier>(c);
    else suite.type_classifier = std::make_unique<RemoteTypeClassifier>(c);
  } else {
    suite.type_classifier = std::make_unique<RuleTypeClassifier>();
  }
  if (remote_usable(cfg.decomposer, "decomposer")) {
    auto c = client(cfg.decomposer, "decomposer");
    if (cfg.decomposer.fallback) suite.decomposer = std::make_unique<FallbackDecomposer>(c);
    else suite.decomposer = std::make_unique<RemoteDecomposer>(c);
  } else {
    suite.decomposer = std::make_unique<RuleDecomposer>();
  }
  if (remote_usable(cfg.qa, "qa")) {
    auto c = client(cfg.qa, "qa");
    if (cfg.qa.fallback) suite.qa = std::make_unique<FallbackQa>(c);
    else suite.qa = std::make_unique<RemoteQaService>(c);
  } else {
    suite.qa = std::make_unique<RuleQa>();
  }
  return suite;
}

struct TrainingExample {
  std::string id;
  ReasoningType type = ReasoningType::Bridge;
  std::string q2, a2;
  Decomposition decomposition;  // subq2 filled
  std::string suba1, suba2;
  std::string q1, a1;
  std::vector<SupportingFact> s1, s2;
  std::vector<std::string> s1_text, s2_text;
  std::shared_ptr<const ContextGraph> graph;
  ReasoningChain chain;
  std::map<std::string, std::string> provenance;
};

struct RecordSkip {
  SkipReason reason;
  std::string detail;
};

using BuildOutcome = std::variant<TrainingExample, RecordSkip>;

namespace detail {

// Largest content-word overlap between any of the node's mentions and `q`.
inline std::size_t node_overlap(const ContextGraph& g, NodeId n, std::string_view q) {
  std::size_t best = 0;
  for (const auto& m : g.mention_texts(n)) best = std::max(best, content_overlap(q, m));
  return best;
}

inline std::optional<std::size_t> edge_between(const ContextGraph& g, NodeId a, NodeId b) {
  for (std::size_t ei : g.incident(a))
    if (g.edges()[ei].other(a) == b) return ei;
  return std::nullopt;
}

// Neighbour of `from` (excluding `skip`) maximizing score; ties to lower id.
inline std::optional<NodeId> best_neighbour(const ContextGraph& g, NodeId from, std::optional<NodeId> skip,
                                            const std::function<std::size_t(NodeId)>& score) {
  std::optional<NodeId> best;
  std::size_t best_score = 0;
  for (std::size_t ei : g.incident(from)) {
    NodeId v = g.edges()[ei].other(from);
    if (skip && v == *skip) continue;
    std::size_t s = score(v);
    if (s > best_score || (s == best_score && s > 0 && best && v < *best)) {
      best_score = s;
      best = v;
    }
  }
  return best;
}

inline ChainNode chain_child(const ContextGraph& g, int index, NodeId node, int parent, NodeId parent_node,
                             std::size_t edge) {
  const Edge& e = g.edges()[edge];
  ChainNode c;
  c.index = index;
  c.node = node;
  c.parent = parent;
  c.edge = edge;
  c.edge_text = e.relation;
  c.direction = e.source == node ? EdgeDirection::ChildToParent : EdgeDirection::ParentToChild;
  c.source_sentence = e.sentence_index;
  (void)parent_node;
  return c;
}

}  // namespace detail

// Answer-as-root chain: N_0 = FindNode(A_2); Bridge adds the bridge entity
// as N_0's child and the remaining entity below it, Intersection hangs both
// entities off N_0. Throws NotFound when a node cannot be matched.
inline ReasoningChain locate_chain(const ContextGraph& g, std::string_view a2, ReasoningType type,
                                   std::string_view q1, std::string_view other_subq) {
  NodeId root = find_node(g, a2);
  ReasoningChain chain;
  ChainNode r;
  r.node = root;
  chain.nodes.push_back(r);
  if (type == ReasoningType::Bridge) {
    auto n1 = detail::best_neighbour(g, root, std::nullopt, [&](NodeId v) {
      std::size_t a = detail::node_overlap(g, v, q1), b = detail::node_overlap(g, v, other_subq);
      return a > 0 && b > 0 ? a + b : 0;
    });
    if (!n1) throw Error(ErrorCode::NotFound, "no neighbour of the answer node appears in both sub-questions");
    auto n2 = detail::best_neighbour(g, *n1, root, [&](NodeId v) { return detail::node_overlap(g, v, other_subq); });
    if (!n2) throw Error(ErrorCode::NotFound, "no node matches the remaining sub-question");
    if (*n2 == root) throw Error(ErrorCode::NotFound, "chain collapses onto the answer");
    chain.nodes.push_back(detail::chain_child(g, 1, *n1, 0, root, *detail::edge_between(g, root, *n1)));
    chain.nodes.push_back(detail::chain_child(g, 2, *n2, 1, *n1, *detail::edge_between(g, *n1, *n2)));
  } else {
    auto n1 = detail::best_neighbour(g, root, std::nullopt, [&](NodeId v) { return detail::node_overlap(g, v, q1); });
    if (!n1) throw Error(ErrorCode::NotFound, "no neighbour of the answer node matches Q_1");
    auto n2 = detail::best_neighbour(g, root, *n1, [&](NodeId v) { return detail::node_overlap(g, v, other_subq); });
    if (!n2) throw Error(ErrorCode::NotFound, "no second neighbour of the answer node matches the other sub-question");
    chain.nodes.push_back(detail::chain_child(g, 1, *n1, 0, root, *detail::edge_between(g, root, *n1)));
    chain.nodes.push_back(detail::chain_child(g, 2, *n2, 0, root, *detail::edge_between(g, root, *n2)));
  }
  assign_rewrite_types(chain);
  return chain;
}

// Bridge keeps the sub-question whose answer equals A_2; Intersection keeps
// subq1. Returns the index (1 or 2) of the kept sub-question.
inline std::optional<int> select_initial(ReasoningType type, std::string_view suba1, std::string_view suba2,
                                         std::string_view a2) {
  if (type == ReasoningType::Intersection) return 1;
  bool m1 = exact_match(suba1, a2) == 1, m2 = exact_match(suba2, a2) == 1;
  if (m1 == m2) return std::nullopt;
  return m2 ? 2 : 1;
}

inline std::vector<SupportingFact> facts_in(const HotpotRecord& r, const Paragraph& p) {
  std::vector<SupportingFact> out;
  for (const auto& f : r.supporting_facts)
    if (f.title == p.title) out.push_back(f);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.sentence < b.sentence; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline BuildOutcome build_example(const HotpotRecord& rec, BackendSuite& backends) {
  auto skip = [](SkipReason r, std::string d) { return BuildOutcome{RecordSkip{r, std::move(d)}}; };
  try {
    auto [p1, p2] = gold_paragraphs(rec);
    std::vector<std::string> sentences = p1->sentences;
    sentences.insert(sentences.end(), p2->sentences.begin(), p2->sentences.end());

    TrainingExample ex;
    ex.id = rec.id;
    ex.q2 = rec.question;
    ex.a2 = rec.answer;

    auto type = backends.type_classifier->classify(rec.question);
    ex.provenance["type"] = type.source;
    ex.type = type.value;
    if (type.value != ReasoningType::Bridge && type.value != ReasoningType::Intersection)
      return skip(SkipReason::TypeFiltered, std::string(to_string(type.value)));

    auto dec = backends.decomposer->decompose(rec.question, type.value);
    if (!dec) return skip(SkipReason::DecomposeFailed, "no split point");
    ex.provenance["decompose"] = dec->source;

    auto s1 = backends.qa->answer(dec->value.subq1, sentences);
    if (text::trim(s1.value).empty()) return skip(SkipReason::QaFailed, "no answer for subq1");
    std::string subq2 = fill_placeholder(dec->value.subq2, s1.value);
    auto s2 = backends.qa->answer(subq2, sentences);
    if (text::trim(s2.value).empty()) return skip(SkipReason::QaFailed, "no answer for subq2");
    ex.provenance["qa"] = s1.source == s2.source ? s1.source : s1.source + "," + s2.source;
    ex.decomposition = {dec->value.subq1, subq2};
    ex.suba1 = s1.value;
    ex.suba2 = s2.value;

    auto kept = select_initial(type.value, ex.suba1, ex.suba2, rec.answer);
    if (!kept) return skip(SkipReason::AnswerMismatch, "sub-answers: \"" + ex.suba1 + "\", \"" + ex.suba2 + "\"");
    ex.q1 = *kept == 1 ? ex.decomposition.subq1 : ex.decomposition.subq2;
    ex.a1 = *kept == 1 ? ex.suba1 : ex.suba2;
    const std::string& other = *kept == 1 ? ex.decomposition.subq2 : ex.decomposition.subq1;

    auto concerns = concerned_paragraph(ex.q1, *p1, *p2);
    if (!concerns) return skip(SkipReason::NoOverlap, "Q_1 shares no content word with either paragraph");
    const Paragraph& first = *concerns == 0 ? *p1 : *p2;
    const Paragraph& second = *concerns == 0 ? *p2 : *p1;
    ex.s1 = facts_in(rec, first);
    ex.s2 = facts_in(rec, second);
    for (const auto& f : ex.s1) ex.s1_text.push_back(first.sentences[f.sentence]);
    for (const auto& f : ex.s2) ex.s2_text.push_back(second.sentences[f.sentence]);

    if (!rec.annotated) return skip(SkipReason::NodeUnfound, "record has no annotated context");
    ex.graph = std::make_shared<const ContextGraph>(build_context_graph(*rec.annotated));
    try {
      ex.chain = locate_chain(*ex.graph, rec.answer, type.value, ex.q1, other);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotFound) throw;
      return skip(SkipReason::NodeUnfound, e.what());
    }
    return ex;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Backend) return skip(SkipReason::BackendError, e.what());
    return skip(SkipReason::InvalidRecord, e.what());
  }
}

inline nlohmann::json example_to_json(const TrainingExample& ex) {
  auto facts = [](const std::vector<SupportingFact>& fs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& f : fs) a.push_back({f.title, f.sentence});
    return a;
  };
  nlohmann::json j;
  j["id"] = ex.id;
  j["type"] = to_string(ex.type);
  j["q2"] = ex.q2;
  j["a2"] = ex.a2;
  j["subq1"] = ex.decomposition.subq1;
  j["subq2"] = ex.decomposition.subq2;
  j["suba1"] = ex.suba1;
  j["suba2"] = ex.suba2;
  j["q1"] = ex.q1;
  j["a1"] = ex.a1;
  j["s1"] = ex.s1_text;
  j["s2"] = ex.s2_text;
  j["s1_facts"] = facts(ex.s1);
  j["s2_facts"] = facts(ex.s2);
  j["chain"] = chain_to_json(*ex.graph, ex.chain);
  j["provenance"] = ex.provenance;
  return j;
}

struct BuildStats {
  std::size_t records_in = 0;
  std::size_t emitted = 0;
  std::map<SkipReason, std::size_t> skips;
  std::map<std::string, std::size_t> types;
  std::map<std::string, std::size_t> provenance;

  std::size_t skipped() const {
    std::size_t n = 0;
    for (const auto& [r, c] : skips) n += c;
    return n;
  }
};

inline nlohmann::json stats_to_json(const BuildStats& s) {
  nlohmann::json j;
  j["records_in"] = s.records_in;
  j["emitted"] = s.emitted;
  j["skipped"] = s.skipped();
  j["skips"] = nlohmann::json::object();
  for (auto r : kSkipReasons) {
    auto it = s.skips.find(r);
    j["skips"][std::string(to_string(r))] = it == s.skips.end() ? 0 : it->second;
  }
  j["types"] = s.types;
  j["provenance"] = s.provenance;
  return j;
}

struct BuildOptions {
  std::size_t workers = 1;
  std::size_t batch = 64;
  // Annotated contexts keyed by record id, for records without an embedded one.
  std::map<std::string, AnnotatedContext> annotations;
};

// Streams records from `path` (JSON array or JSONL), writes one example per
// line to `out` in input order and returns the accounting.
inline BuildStats build_dataset(const std::string& path, BackendSuite& backends, std::ostream& out,
                                const BuildOptions& opts = {}, std::ostream* skip_log = nullptr) {
  BuildStats stats;
  JsonlWriter writer(out);
  std::vector<nlohmann::json> batch;
  auto flush = [&] {
    auto outcomes = parallel_map<BuildOutcome>(batch.size(), opts.workers, [&](std::size_t i) -> BuildOutcome {
      HotpotRecord rec;
      try {
        rec = hotpot_from_json(batch[i]);
      } catch (const Error& e) {
        return RecordSkip{SkipReason::InvalidRecord, e.what()};
      }
      if (!rec.annotated) {
        if (auto it = opts.annotations.find(rec.id); it != opts.annotations.end()) rec.annotated = it->second;
      }
      return build_example(rec, backends);
    });
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      ++stats.records_in;
      if (auto* ex = std::get_if<TrainingExample>(&outcomes[i])) {
        ++stats.emitted;
        ++stats.types[std::string(to_string(ex->type))];
        for (const auto& [stage, src] : ex->provenance) ++stats.provenance[stage + ":" + src];
        writer.write(example_to_json(*ex));
      } else {
        const auto& s = std::get<RecordSkip>(outcomes[i]);
        ++stats.skips[s.reason];
        if (skip_log) {
          std::string id = batch[i].is_object() && batch[i].contains("_id") ? batch[i]["_id"].dump() : "?";
          *skip_log << "skip " << id << " " << to_string(s.reason) << ": " << s.detail << "\n";
        }
      }
    }
    batch.clear();
  };
  for_each_json_record(path, [&](nlohmann::json&& j, std::size_t) {
    batch.push_back(std::move(j));
    if (batch.size() >= opts.batch) flush();
  });
  flush();
  return stats;
}

}  // namespace hopqg
