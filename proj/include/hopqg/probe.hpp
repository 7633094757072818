#pragma once

// Difficulty probe: asks a QA backend every generated question (final and,
// by default, intermediate) and aggregates SQuAD EM/F1 per hop count.

#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqg/error.hpp"
#include "hopqg/http_client.hpp"
#include "hopqg/squad.hpp"
#include "hopqg/worker_pool.hpp"

namespace hopqg {

struct ProbeItem {
  std::string id;
  std::string question;
  std::string context;
  std::string gold;
  int hops = 0;  // withheld from remote backends
};

class QaBackend {
 public:
  virtual ~QaBackend() = default;
  virtual std::string name() const = 0;
  virtual std::string answer(const ProbeItem& item) = 0;
};

class OracleQa : public QaBackend {
 public:
  std::string name() const override { return "oracle"; }
  std::string answer(const ProbeItem& item) override { return item.gold; }
};

class EmptyQa : public QaBackend {
 public:
  std::string name() const override { return "empty"; }
  std::string answer(const ProbeItem&) override { return ""; }
};

// {"question","context"} -> {"answer"}
class RemoteQa : public QaBackend {
 public:
  explicit RemoteQa(JsonClient client) : client_(std::move(client)) {}
  std::string name() const override { return "remote:" + client_.endpoint().str(); }
  std::string answer(const ProbeItem& item) override {
    return client_.post_for_string({{"question", item.question}, {"context", item.context}}, "answer");
  }

 private:
  JsonClient client_;
};

// Final question at its d, plus Q_k at k for each intermediate when asked.
// Every Q_k in a trace shares the trace's answer.
inline std::vector<ProbeItem> probe_items_from_trace(const nlohmann::json& trace, bool include_intermediates = true) {
  std::vector<ProbeItem> out;
  try {
    std::string id = trace.value("id", std::string{});
    std::string context = trace.at("context").get<std::string>();
    std::string gold = trace.at("answer").get<std::string>();
    int d = trace.at("d").get<int>();
    if (include_intermediates && trace.contains("intermediates")) {
      int k = 1;
      for (const auto& q : trace.at("intermediates")) {
        out.push_back({id + "#q" + std::to_string(k), q.get<std::string>(), context, gold, k});
        ++k;
      }
    }
    out.push_back({id, trace.at("question").get<std::string>(), context, gold, d});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("trace schema: ") + e.what());
  }
  return out;
}

struct ProbeBucket {
  int hops = 0;
  std::size_t count = 0;
  double em_sum = 0;
  double f1_sum = 0;

  double em() const { return count ? em_sum / static_cast<double>(count) : 0.0; }
  double f1() const { return count ? f1_sum / static_cast<double>(count) : 0.0; }
};

struct ProbeResult {
  std::string backend;
  std::map<int, ProbeBucket> buckets;
  std::size_t failures = 0;
  bool incomplete = false;
  std::vector<std::string> errors;
};

inline ProbeResult difficulty_probe(const std::vector<ProbeItem>& items, QaBackend& qa, std::size_t concurrency = 1) {
  struct Outcome {
    bool ok = false;
    std::string answer;
    std::string error;
  };
  auto outcomes = parallel_map<Outcome>(items.size(), concurrency, [&](std::size_t i) {
    try {
      return Outcome{true, qa.answer(items[i]), {}};
    } catch (const Error& e) {
      return Outcome{false, {}, items[i].id + ": " + e.what()};
    }
  });
  ProbeResult r;
  r.backend = qa.name();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!outcomes[i].ok) {
      ++r.failures;
      r.incomplete = true;
      r.errors.push_back(outcomes[i].error);
      continue;
    }
    auto& b = r.buckets[items[i].hops];
    b.hops = items[i].hops;
    ++b.count;
    b.em_sum += exact_match(outcomes[i].answer, items[i].gold);
    b.f1_sum += token_f1(outcomes[i].answer, items[i].gold);
  }
  return r;
}

// Published QA scores on 1-hop vs 2-hop generated sets, shown next to the
// measured buckets as a sanity label only.
struct ReferenceScore {
  const char* model;
  int hops;
  double em;
  double f1;
};

inline constexpr ReferenceScore kReferenceScores[] = {
    {"BERT", 1, 0.618, 0.737},
    {"BERT", 2, 0.295, 0.381},
    {"RoBERTa", 1, 0.882, 0.937},
    {"RoBERTa", 2, 0.506, 0.663},
};

inline nlohmann::json probe_to_json(const ProbeResult& r) {
  nlohmann::json j;
  j["backend"] = r.backend;
  j["scale"] = "fraction";
  j["incomplete"] = r.incomplete;
  j["failures"] = r.failures;
  j["errors"] = r.errors;
  j["buckets"] = nlohmann::json::array();
  for (const auto& [d, b] : r.buckets)
    j["buckets"].push_back({{"d", d}, {"count", b.count}, {"em", b.em()}, {"f1", b.f1()}});
  j["reference"] = nlohmann::json::array();
  for (const auto& ref : kReferenceScores)
    j["reference"].push_back({{"model", ref.model}, {"d", ref.hops}, {"em", ref.em}, {"f1", ref.f1}});
  return j;
}

inline std::string probe_to_table(const ProbeResult& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "backend: " << r.backend << (r.incomplete ? "  (INCOMPLETE)" : "") << "\n";
  os << std::left << std::setw(8) << "d" << std::setw(8) << "count" << std::setw(8) << "EM" << "F1\n";
  for (const auto& [d, b] : r.buckets)
    os << std::setw(8) << d << std::setw(8) << b.count << std::setw(8) << b.em() << b.f1() << "\n";
  os << "reference (published, labels only):\n";
  for (const auto& ref : kReferenceScores)
    os << "  " << std::setw(8) << ref.model << "d=" << ref.hops << "  EM " << ref.em << "  F1 " << ref.f1 << "\n";
  return os.str();
}

}  // namespace hopqg
