#pragma once

// Step-by-step question generation over a reasoning chain: Q_1 from the
// initial generator, then one rewrite per remaining chain node in preorder.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hopqg/chain_planner.hpp"
#include "hopqg/context_graph.hpp"
#include "hopqg/error.hpp"
#include "hopqg/generator_input.hpp"
#include "hopqg/http_client.hpp"
#include "hopqg/templates.hpp"

namespace hopqg {

struct InitialRequest {
  GeneratorInput input;
  std::string child;
  std::string answer;
  std::string answer_ne_type;
  std::string relation;
  EdgeDirection direction = EdgeDirection::ChildToParent;
};

struct RewriteRequest {
  GeneratorInput input;
  std::string q_prev;
  std::string child;
  // Text in q_prev that currently stands for the parent; nullopt for the answer.
  std::optional<std::string> parent_phrase;
  std::string relation;
  EdgeDirection direction = EdgeDirection::ChildToParent;
  RewriteType type = RewriteType::Bridge;
  std::string category = "one";
};

struct GenerationResult {
  std::string question;
  std::optional<std::pair<std::string, std::string>> substitution;
};

class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  virtual std::string name() const = 0;
  virtual GenerationResult initial(const InitialRequest& req) = 0;
  virtual GenerationResult rewrite(const RewriteRequest& req) = 0;
};

class TemplateGenerator : public QuestionGenerator {
 public:
  explicit TemplateGenerator(TemplateConfig cfg = {}) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "template"; }

  GenerationResult initial(const InitialRequest& req) override {
    return {template_generate_initial(req.child, req.relation, req.direction, req.answer_ne_type, cfg_),
            std::nullopt};
  }

  GenerationResult rewrite(const RewriteRequest& req) override {
    auto r = template_rewrite(req.q_prev, req.child, req.parent_phrase, req.relation, req.direction, req.type,
                              req.category);
    return {std::move(r.question), std::move(r.substitution)};
  }

 private:
  TemplateConfig cfg_;
};

struct RemoteGenerationOptions {
  double top_p = 0.9;
  int max_tokens = 64;
};

inline nlohmann::json generation_request_json(const GeneratorInput& in, const RemoteGenerationOptions& o) {
  nlohmann::json segs = nlohmann::json::array();
  for (auto s : in.segments) segs.push_back(std::string(to_string(s)));
  return {{"text", in.text}, {"segments", segs}, {"top_p", o.top_p}, {"max_tokens", o.max_tokens},
          {"step", in.step}};
}

class RemoteGenerator : public QuestionGenerator {
 public:
  RemoteGenerator(JsonClient client, RemoteGenerationOptions opts = {})
      : client_(std::move(client)), opts_(opts) {}
  std::string name() const override { return "remote"; }

  GenerationResult initial(const InitialRequest& req) override { return {call(req.input), std::nullopt}; }
  GenerationResult rewrite(const RewriteRequest& req) override { return {call(req.input), std::nullopt}; }

 private:
  std::string call(const GeneratorInput& in) {
    auto q = client_.post_for_string(generation_request_json(in, opts_), "question");
    if (text::trim(q).empty())
      throw Error(ErrorCode::Backend, "generation service returned an empty question at step " +
                                          std::to_string(in.step));
    return std::string(text::trim(q));
  }

  JsonClient client_;
  RemoteGenerationOptions opts_;
};

struct TraceStep {
  int i = 0;
  std::string question;
  GeneratorInput input;
};

struct QuestionTrace {
  std::vector<TraceStep> steps;
  std::string answer;
  int d = 0;
  int rewrite_calls = 0;

  const std::string& question() const { return steps.back().question; }
};

class GenerationError : public Error {
 public:
  GenerationError(const Error& cause, QuestionTrace partial, int step)
      : Error(cause.code(), "step " + std::to_string(step) + ": " + cause.what(), static_cast<std::size_t>(step)),
        partial_(std::move(partial)) {}
  const QuestionTrace& partial() const noexcept { return partial_; }

 private:
  QuestionTrace partial_;
};

inline QuestionTrace generate_stepwise(const ContextGraph& g, const ReasoningChain& chain, QuestionGenerator& gen) {
  if (auto v = chain_violations(g, chain); !v.empty())
    throw Error(ErrorCode::InvalidInput, "invalid chain: " + v.front());
  if (chain.d() < 1) throw Error(ErrorCode::InvalidInput, "chain has no hops");

  QuestionTrace trace;
  trace.answer = g.node(chain.answer()).surface;
  trace.d = chain.d();

  // Phrase currently standing for each chain node inside the question.
  std::vector<std::optional<std::string>> phrase(chain.nodes.size());

  for (const ChainNode& cn : chain.nodes) {
    if (cn.index == 0) continue;
    const ChainNode& parent = chain.nodes[static_cast<std::size_t>(*cn.parent)];
    const Node& child_node = g.node(cn.node);
    const Node& parent_node = g.node(parent.node);
    const std::string& sentence = context_sentence(g, cn).text;
    try {
      GenerationResult res;
      GeneratorInput input;
      if (cn.index == 1) {
        input = assemble_initial_input(node_view(g, cn.node), node_view(g, parent.node), sentence, cn.edge_text,
                                       cn.direction);
        InitialRequest req{input, child_node.surface, parent_node.surface, parent_node.ne_type, cn.edge_text,
                           cn.direction};
        res = gen.initial(req);
      } else {
        input = assemble_rewrite_input(trace.question(), node_view(g, cn.node), node_view(g, parent.node), sentence,
                                       cn.edge_text, cn.direction, *cn.rewrite_type, cn.index);
        RewriteRequest req{input,          trace.question(), child_node.surface,
                           phrase[static_cast<std::size_t>(parent.index)],
                           cn.edge_text,   cn.direction,     *cn.rewrite_type,
                           category_word(g, parent.node)};
        res = gen.rewrite(req);
        ++trace.rewrite_calls;
      }
      if (res.substitution) {
        const auto& [from, to] = *res.substitution;
        for (auto& p : phrase) {
          if (!p) continue;
          if (auto at = p->find(from); at != std::string::npos) p->replace(at, from.size(), to);
        }
      }
      phrase[static_cast<std::size_t>(cn.index)] = child_node.surface;
      trace.steps.push_back({cn.index, std::move(res.question), std::move(input)});
    } catch (const GenerationError&) {
      throw;
    } catch (const Error& e) {
      throw GenerationError(e, trace, cn.index);
    }
  }
  return trace;
}

// Sentences S_1..S_d in chain order, deduplicated, in context order.
inline std::vector<std::size_t> support_sentences(const ReasoningChain& chain) {
  std::set<std::size_t> s;
  for (const auto& n : chain.nodes)
    if (n.source_sentence) s.insert(*n.source_sentence);
  return {s.begin(), s.end()};
}

inline nlohmann::json trace_to_json(const ContextGraph& g, const ReasoningChain& chain, const QuestionTrace& trace,
                                    const std::string& id) {
  nlohmann::json j;
  j["id"] = id;
  j["question"] = trace.question();
  j["answer"] = trace.answer;
  j["d"] = trace.d;
  j["chain"] = chain_to_json(g, chain);
  j["intermediates"] = nlohmann::json::array();
  for (std::size_t k = 0; k + 1 < trace.steps.size(); ++k) j["intermediates"].push_back(trace.steps[k].question);
  j["inputs"] = nlohmann::json::array();
  for (const auto& s : trace.steps) j["inputs"].push_back(s.input.text);
  j["context"] = g.context().context;
  j["support"] = nlohmann::json::array();
  for (auto si : support_sentences(chain)) j["support"].push_back(g.context().sentences.at(si).text);
  return j;
}

}  // namespace hopqg
