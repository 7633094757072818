#pragma once

// Plan + generate over a stream of annotated contexts.

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqg/chain_planner.hpp"
#include "hopqg/context.hpp"
#include "hopqg/context_graph.hpp"
#include "hopqg/error.hpp"
#include "hopqg/generation.hpp"
#include "hopqg/jsonl.hpp"
#include "hopqg/worker_pool.hpp"

namespace hopqg {

struct GenerateOptions {
  int d = 2;
  std::uint64_t seed = 0;
  std::optional<std::string> answer;  // answer text, matched with find_node
  bool all_answers = false;           // one question per eligible answer node
  std::size_t workers = 1;
  std::size_t batch = 64;
};

struct GenerateStats {
  std::size_t contexts = 0;
  std::size_t questions = 0;
  std::size_t initial_calls = 0;
  std::size_t rewrite_calls = 0;
  std::size_t insufficient_context = 0;
  std::size_t failures = 0;
  std::vector<std::string> warnings;
};

// Per-context seed: contexts are independent of their neighbours in the file.
inline std::uint64_t context_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

struct ContextOutcome {
  std::vector<nlohmann::json> traces;
  std::vector<std::string> warnings;
  std::size_t insufficient = 0;
  std::size_t failures = 0;
  std::size_t initial_calls = 0;
  std::size_t rewrite_calls = 0;
};

inline ContextOutcome generate_for_context(const nlohmann::json& record, std::size_t index,
                                           QuestionGenerator& gen, const GenerateOptions& opts) {
  ContextOutcome out;
  std::string id = record.is_object() && record.contains("id") && record["id"].is_string()
                       ? record["id"].get<std::string>()
                       : "ctx" + std::to_string(index);
  std::optional<ContextGraph> g;
  try {
    g = build_context_graph(context_from_json(record));
  } catch (const Error& e) {
    ++out.failures;
    out.warnings.push_back(id + ": " + e.what());
    return out;
  }

  std::vector<std::optional<NodeId>> answers;
  if (opts.answer) {
    try {
      answers.push_back(find_node(*g, *opts.answer));
    } catch (const Error& e) {
      ++out.failures;
      out.warnings.push_back(id + ": " + e.what());
      return out;
    }
  } else if (opts.all_answers) {
    for (NodeId n : eligible_answer_nodes(*g)) answers.push_back(n);
    if (answers.empty()) {
      ++out.failures;
      out.warnings.push_back(id + ": no eligible answer node");
      return out;
    }
  } else {
    answers.push_back(std::nullopt);
  }

  std::uint64_t seed = context_seed(opts.seed, index);
  for (const auto& a : answers) {
    std::string trace_id = opts.all_answers ? id + "#n" + std::to_string(a->value) : id;
    ReasoningChain chain;
    try {
      chain = plan_chain(*g, DifficultyLevel(opts.d), seed, a);
    } catch (const InsufficientContextError& e) {
      ++out.insufficient;
      out.warnings.push_back(trace_id + ": " + e.what());
      continue;
    } catch (const Error& e) {
      ++out.failures;
      out.warnings.push_back(trace_id + ": " + e.what());
      continue;
    }
    try {
      auto trace = generate_stepwise(*g, chain, gen);
      ++out.initial_calls;
      out.rewrite_calls += static_cast<std::size_t>(trace.rewrite_calls);
      out.traces.push_back(trace_to_json(*g, chain, trace, trace_id));
    } catch (const GenerationError& e) {
      ++out.failures;
      if (!e.partial().steps.empty()) ++out.initial_calls;
      out.rewrite_calls += static_cast<std::size_t>(e.partial().rewrite_calls);
      out.warnings.push_back(trace_id + ": " + e.what());
    }
  }
  return out;
}

}  // namespace detail

// Streams contexts from `path` (one JSON object, a JSON array or JSONL) and
// writes one trace per line to `out`, in input order.
inline GenerateStats run_generation(const std::string& path, QuestionGenerator& gen, std::ostream& out,
                                    const GenerateOptions& opts) {
  DifficultyLevel check(opts.d);
  (void)check;
  GenerateStats stats;
  JsonlWriter writer(out);
  std::vector<nlohmann::json> batch;
  std::size_t base = 0;
  auto flush = [&] {
    auto outcomes = parallel_map<detail::ContextOutcome>(
        batch.size(), opts.workers, [&](std::size_t i) { return detail::generate_for_context(batch[i], base + i, gen, opts); });
    for (auto& o : outcomes) {
      ++stats.contexts;
      for (auto& t : o.traces) {
        writer.write(t);
        ++stats.questions;
      }
      stats.insufficient_context += o.insufficient;
      stats.failures += o.failures;
      stats.initial_calls += o.initial_calls;
      stats.rewrite_calls += o.rewrite_calls;
      for (auto& w : o.warnings) stats.warnings.push_back(std::move(w));
    }
    base += batch.size();
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
