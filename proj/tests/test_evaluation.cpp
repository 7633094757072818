#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hopqg/augment.hpp"
#include "hopqg/evaluation.hpp"
#include "hopqg/filter.hpp"
#include "hopqg/probe.hpp"

using namespace hopqg;

namespace {

std::string words(std::size_t n, const std::string& stem = "w") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + stem + std::to_string(i);
  return s + "?";
}

QaPair pair(std::string id, std::string q, std::string a) { return {std::move(id), std::move(q), std::move(a), {}}; }

nlohmann::json trace(const std::string& id, int d, const std::string& answer) {
  nlohmann::json j{{"id", id}, {"question", "final " + id}, {"answer", answer}, {"d", d},
                   {"context", "ctx " + answer}, {"intermediates", nlohmann::json::array()}};
  for (int k = 1; k < d; ++k) j["intermediates"].push_back("q" + std::to_string(k) + " " + id);
  return j;
}

class ScriptedQa : public QaBackend {
 public:
  explicit ScriptedQa(std::map<std::string, std::string> a) : a_(std::move(a)) {}
  std::string name() const override { return "scripted"; }
  std::string answer(const ProbeItem& item) override {
    auto it = a_.find(item.question);
    if (it == a_.end()) throw Error(ErrorCode::Backend, "no scripted answer");
    return it->second;
  }

 private:
  std::map<std::string, std::string> a_;
};

}  // namespace

TEST(Filter, LengthBoundariesAreInclusive) {
  auto r = filter_generated({pair("5", words(5), "x"), pair("6", words(6), "x"), pair("30", words(30), "x"),
                             pair("31", words(31), "x")});
  std::set<std::string> kept;
  for (const auto& p : r.kept) kept.insert(p.id);
  EXPECT_EQ(kept, (std::set<std::string>{"6", "30"}));
  ASSERT_EQ(r.dropped.size(), 2u);
  for (const auto& d : r.dropped) EXPECT_EQ(d.reasons, std::vector<std::string>{"length"});
}

TEST(Filter, AnswerLeak) {
  EXPECT_TRUE(answer_leaks("Who starred Top Gun and married Tom Cruise?", "Tom Cruise"));
  EXPECT_TRUE(answer_leaks("Who directed the film by the Alfred Hitchcock?", "Alfred Hitchcock."));
  EXPECT_FALSE(answer_leaks("Who sailed the Cruiser Tomcat today?", "Cruise"));
  EXPECT_FALSE(answer_leaks("Who starred in the film directed by Tony Scott?", "Tom Cruise"));
  auto reasons = filter_reasons("Tom Cruise?", "Tom Cruise");
  EXPECT_EQ(reasons, (std::vector<std::string>{"length", "answer-leak"}));
}

TEST(Filter, PartitionAndIdempotence) {
  std::mt19937_64 rng(3);
  std::vector<QaPair> in;
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + rng() % 40;
    std::string q = words(n);
    std::string a = rng() % 4 == 0 ? "w0" : "zz";
    in.push_back(pair(std::to_string(i), q, a));
  }
  auto once = filter_generated(in);
  EXPECT_EQ(once.kept.size() + once.dropped.size(), in.size());
  auto twice = filter_generated(once.kept);
  EXPECT_TRUE(twice.dropped.empty());
  EXPECT_EQ(twice.kept.size(), once.kept.size());
}

TEST(Filter, ConfiguredBounds) {
  FilterConfig cfg{3, 4};
  auto r = filter_generated({pair("2", words(2), "x"), pair("3", words(3), "x"), pair("5", words(5), "x")}, cfg);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].id, "3");
}

TEST(Probe, ItemsFromTrace) {
  auto items = probe_items_from_trace(trace("t", 3, "Ann"));
  ASSERT_EQ(items.size(), 3u);
  EXPECT_EQ(items[0].id, "t#q1");
  EXPECT_EQ(items[0].hops, 1);
  EXPECT_EQ(items[1].hops, 2);
  EXPECT_EQ(items[2].id, "t");
  EXPECT_EQ(items[2].hops, 3);
  EXPECT_EQ(probe_items_from_trace(trace("t", 3, "Ann"), false).size(), 1u);
  EXPECT_THROW(probe_items_from_trace(nlohmann::json{{"id", "x"}}), Error);
}

TEST(Probe, OracleScoresOneEverywhere) {
  std::vector<ProbeItem> items;
  for (int i = 0; i < 6; ++i)
    for (auto& it : probe_items_from_trace(trace("t" + std::to_string(i), 1 + i % 3, "Ann Lee"))) items.push_back(it);
  OracleQa qa;
  auto r = difficulty_probe(items, qa, 3);
  EXPECT_FALSE(r.incomplete);
  ASSERT_EQ(r.buckets.size(), 3u);
  for (const auto& [d, b] : r.buckets) {
    EXPECT_DOUBLE_EQ(b.em(), 1.0) << d;
    EXPECT_DOUBLE_EQ(b.f1(), 1.0) << d;
  }
}

TEST(Probe, EmptyScoresZero) {
  auto items = probe_items_from_trace(trace("t", 2, "Ann"));
  EmptyQa qa;
  auto r = difficulty_probe(items, qa);
  for (const auto& [d, b] : r.buckets) {
    EXPECT_DOUBLE_EQ(b.em(), 0.0);
    EXPECT_DOUBLE_EQ(b.f1(), 0.0);
  }
}

TEST(Probe, EmNeverExceedsF1AndFailuresFlagIncomplete) {
  std::vector<ProbeItem> items = {
      {"a", "qa", "c", "Tom Cruise", 1}, {"b", "qb", "c", "Tom Cruise", 1},
      {"c", "qc", "c", "Top Gun", 2},    {"d", "qd", "c", "Tony Scott", 2}};
  ScriptedQa qa({{"qa", "Cruise"}, {"qb", "tom cruise"}, {"qc", "Gun"}});
  auto r = difficulty_probe(items, qa, 2);
  EXPECT_TRUE(r.incomplete);
  EXPECT_EQ(r.failures, 1u);
  EXPECT_DOUBLE_EQ(r.buckets.at(1).em(), 0.5);
  EXPECT_NEAR(r.buckets.at(1).f1(), (2.0 / 3.0 + 1.0) / 2.0, 1e-12);
  EXPECT_EQ(r.buckets.at(2).count, 1u);
  for (const auto& [d, b] : r.buckets) EXPECT_LE(b.em(), b.f1());
  auto j = probe_to_json(r);
  EXPECT_EQ(j["scale"], "fraction");
  EXPECT_TRUE(j["incomplete"].get<bool>());
  EXPECT_NE(probe_to_table(r).find("INCOMPLETE"), std::string::npos);
}

TEST(Probe, ReferenceLabels) {
  auto j = probe_to_json(ProbeResult{});
  bool bert1 = false, bert2 = false;
  for (const auto& r : j["reference"]) {
    if (r["model"] == "BERT" && r["d"] == 1) bert1 = r["em"].get<double>() == 0.618;
    if (r["model"] == "BERT" && r["d"] == 2) bert2 = r["em"].get<double>() == 0.295;
  }
  EXPECT_TRUE(bert1);
  EXPECT_TRUE(bert2);
}

namespace {

std::vector<QaExample> examples(std::size_t n, const std::string& src) {
  std::vector<QaExample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({src + std::to_string(i), "q" + std::to_string(i), "a" + std::to_string(i),
                   "ctx a" + std::to_string(i), src});
  return out;
}

}  // namespace

TEST(Augment, OversamplesOriginalsToRatio) {
  auto r = emit_augmentation(examples(100, "generated"), examples(50, "original"), {4.0, 7});
  EXPECT_GE(r.originals, 400u);
  EXPECT_EQ(r.copies, 8u);
  EXPECT_EQ(r.generated, 100u);
  EXPECT_EQ(r.lines.size(), r.originals + r.generated);
  std::size_t orig = 0;
  std::set<std::string> ids;
  for (const auto& l : r.lines) {
    orig += l.source == "original";
    ids.insert(l.id);
  }
  EXPECT_EQ(orig, r.originals);
  EXPECT_EQ(ids.size(), r.lines.size());
}

TEST(Augment, RatioOneWithEnoughOriginalsDuplicatesNothing) {
  auto r = emit_augmentation(examples(10, "generated"), examples(30, "original"), {1.0, 0});
  EXPECT_EQ(r.copies, 1u);
  EXPECT_EQ(r.originals, 30u);
  EXPECT_EQ(r.lines.size(), 40u);
}

TEST(Augment, SeededShuffleAndValidation) {
  auto a = emit_augmentation(examples(5, "generated"), examples(5, "original"), {2.0, 11});
  auto b = emit_augmentation(examples(5, "generated"), examples(5, "original"), {2.0, 11});
  ASSERT_EQ(a.lines.size(), b.lines.size());
  for (std::size_t i = 0; i < a.lines.size(); ++i) EXPECT_EQ(a.lines[i].id, b.lines[i].id);
  EXPECT_THROW(emit_augmentation({}, {}, {0.5, 0}), Error);
  auto j = qa_example_to_json({"x", "q", "Ann", "said Ann", "generated"});
  EXPECT_EQ(j["answers"]["answer_start"][0], 5);
}

TEST(EvaluationReport, IdenticalFilesScoreOne) {
  std::vector<std::string> lines = {"who starred top gun ?", "who directed the film directed by tony scott ?",
                                    "which place was tom cruise born in ?"};
  auto corpus = corpus_from_lines(lines, {lines});
  auto r = evaluate(corpus, parse_metric_list("bleu3,bleu4,rouge-l,meteor-s,em,f1"));
  for (const auto& [m, v] : r.scores) EXPECT_NEAR(v, 1.0, 1e-12) << m;
  auto cider_detail_r = cider_detail(corpus);
  for (const auto& row : cider_detail_r.cosines)
    for (double c : row) EXPECT_NEAR(c, 1.0, 1e-12);
  auto j = report_to_json(r);
  EXPECT_EQ(j["scale"], "fraction");
  EXPECT_NE(report_to_table(r).find("meteor-s"), std::string::npos);
}

TEST(EvaluationReport, InputValidation) {
  EXPECT_THROW(parse_metric_list("bleu5"), Error);
  EXPECT_THROW(parse_metric_list(" , "), Error);
  EXPECT_EQ(parse_metric_list("BLEU4, cider,bleu4"), (std::vector<std::string>{"bleu4", "cider"}));
  EXPECT_THROW(corpus_from_lines({"a", "b"}, {{"a"}}), Error);
  EXPECT_THROW(corpus_from_lines({"a"}, {}), Error);
  EXPECT_THROW(evaluate({}, {"bleu4"}), Error);
}
