#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hopqg/context_graph.hpp"
#include "hopqg/manifest.hpp"
#include "test_support.hpp"

using namespace hopqg;
using hopqg::testing::fixture_path;
using hopqg::testing::load_fixture;
using hopqg::testing::read_file;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

RunResult run(const std::vector<std::string>& args) {
  std::string cmd = quote(HOPQG_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  RunResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("hopqg_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& body) const {
    std::ofstream(path(name), std::ios::binary) << body;
    return path(name);
  }
  static std::vector<nlohmann::json> jsonl(const std::string& p) {
    std::vector<nlohmann::json> out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);)
      if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    return out;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VersionAndHelp) {
  auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(std::string("hopqg ") + kToolVersion), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"generate", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, BuildGraphMatchesLibraryAndIsIdempotent) {
  auto a = path("a.json"), b = path("b.json");
  ASSERT_EQ(run({"build-graph", "--context", fixture_path("fig1_context.json"), "--out", a}).code, 0);
  ASSERT_EQ(run({"build-graph", "--context", fixture_path("fig1_context.json"), "--out", b}).code, 0);
  EXPECT_EQ(read_file(a), read_file(b));
  auto lib = graph_to_json(build_context_graph(context_from_json(load_fixture("fig1_context.json"))));
  EXPECT_EQ(nlohmann::json::parse(read_file(a)), lib);
  auto m = nlohmann::json::parse(read_file(a + ".manifest.json"));
  EXPECT_EQ(m["command"], "build-graph");
  EXPECT_EQ(m["inputs"][0]["sha256"], digest_file(fixture_path("fig1_context.json")).sha256);
  EXPECT_EQ(m["outputs"][0]["sha256"], digest_file(a).sha256);
  EXPECT_EQ(m["exit_code"], 0);
}

TEST_F(CliTest, MalformedInputExitsTwoWithPosition) {
  auto bad = write("bad.json", "{\n  \"id\": ,\n}\n");
  auto r = run({"build-graph", "--context", bad, "--out", path("g.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("bad.json:2:"), std::string::npos) << r.out;
  EXPECT_EQ(run({"build-graph", "--context", path("missing.json"), "--out", path("g.json")}).code, 2);
}

TEST_F(CliTest, GenerateFig1TwoHop) {
  auto out = path("t.jsonl");
  auto r = run({"generate", "--context", fixture_path("fig1_context.json"), "--d", "2", "--answer", "Tom Cruise",
                "--out", out});
  ASSERT_EQ(r.code, 0) << r.out;
  auto traces = jsonl(out);
  ASSERT_EQ(traces.size(), 1u);
  std::string q = traces[0]["question"];
  EXPECT_NE(q.find("directed by Tony Scott"), std::string::npos) << q;
  EXPECT_EQ(q.find("Top Gun"), std::string::npos);
  EXPECT_EQ(q.find("Tom Cruise"), std::string::npos);
  EXPECT_EQ(traces[0]["answer"], "Tom Cruise");
  EXPECT_EQ(traces[0]["d"], 2);
}

TEST_F(CliTest, OneHopMakesNoRewriteCalls) {
  auto out = path("t.jsonl");
  ASSERT_EQ(run({"generate", "--context", fixture_path("fig1_context.json"), "--d", "1", "--all-answers", "--out", out})
                .code,
            0);
  auto m = nlohmann::json::parse(read_file(out + ".manifest.json"));
  EXPECT_EQ(m["stages"]["rewrite_calls"].value("count", 0), 0);
  EXPECT_GT(m["stages"]["initial_calls"].value("count", 0), 0);
  EXPECT_EQ(static_cast<std::size_t>(m["stages"]["initial_calls"]["count"]), jsonl(out).size());
}

TEST_F(CliTest, SameSeedSameBytes) {
  auto a = path("a.jsonl"), b = path("b.jsonl");
  for (const auto& o : {a, b})
    ASSERT_EQ(run({"generate", "--context", fixture_path("star_contexts.jsonl"), "--d", "3", "--seed", "5", "--workers",
                   "2", "--out", o})
                  .code,
              0);
  EXPECT_EQ(read_file(a), read_file(b));
  EXPECT_FALSE(read_file(a).empty());
}

TEST_F(CliTest, PlanWritesValidChains) {
  auto out = path("p.jsonl");
  ASSERT_EQ(run({"plan", "--context", fixture_path("star_contexts.jsonl"), "--d", "3", "--out", out}).code, 0);
  auto lines = jsonl(out);
  EXPECT_FALSE(lines.empty());
  for (const auto& l : lines) EXPECT_EQ(l["chain"]["nodes"].size(), 4u);
}

TEST_F(CliTest, BuildDatasetWithRuleBackends) {
  auto out = path("ex.jsonl");
  auto r = run({"build-dataset", "--hotpot", fixture_path("hotpot_fixture.json"), "--out", out});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(jsonl(out).size(), 2u);
  auto stats = nlohmann::json::parse(read_file(out + ".stats.json"));
  EXPECT_EQ(stats["records_in"], 3);
  EXPECT_EQ(stats["emitted"], 2);
  EXPECT_EQ(stats["skipped"], 1);
}

TEST_F(CliTest, RemoteBackendWithoutEndpointOrFallbackExitsTwo) {
  auto backends = write("b.json", R"({"qa": {"kind": "remote", "fallback": false}})");
  auto r = run({"build-dataset", "--hotpot", fixture_path("hotpot_fixture.json"), "--backends", backends, "--out",
                path("ex.jsonl")});
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_FALSE(fs::exists(path("ex.jsonl")) && !read_file(path("ex.jsonl")).empty());
}

TEST_F(CliTest, EvaluateIdenticalFiles) {
  auto f = write("h.txt", "who starred the film directed by tony scott ?\nwhich city was he born in ?\n");
  auto out = path("r.json");
  ASSERT_EQ(run({"evaluate", "--hyp", f, "--ref", f, "--metrics", "bleu4,rouge-l,meteor-s,em,f1", "--out", out}).code,
            0);
  auto rep = nlohmann::json::parse(read_file(out));
  for (auto& [k, v] : rep["scores"].items()) EXPECT_NEAR(v.get<double>(), 1.0, 1e-9) << k;
  auto short_ref = write("r.txt", "only one line\n");
  EXPECT_EQ(run({"--manifest", path("m1.json"), "evaluate", "--hyp", f, "--ref", short_ref}).code, 2);
  EXPECT_EQ(run({"--manifest", path("m2.json"), "evaluate", "--hyp", f, "--ref", f, "--metrics", "bleu9"}).code, 2);
  EXPECT_TRUE(fs::exists(path("m2.json")));
}

TEST_F(CliTest, FilterBoundaries) {
  auto q = [](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
    return s + "?";
  };
  std::string body;
  for (int n : {5, 6, 30, 31})
    body += nlohmann::json{{"id", std::to_string(n)}, {"question", q(n)}, {"answer", "zz"}}.dump() + "\n";
  body += nlohmann::json{{"id", "leak"}, {"question", "Who married Tom Cruise in the year after that?"}, {"answer", "Tom Cruise"}}.dump() + "\n";
  auto in = write("in.jsonl", body);
  auto kept = path("kept.jsonl"), dropped = path("dropped.jsonl");
  ASSERT_EQ(run({"filter", "--in", in, "--out", kept, "--dropped", dropped}).code, 0);
  std::vector<std::string> ids;
  for (const auto& j : jsonl(kept)) ids.push_back(j["id"]);
  EXPECT_EQ(ids, (std::vector<std::string>{"6", "30"}));
  auto d = jsonl(dropped);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[2]["filter_reasons"], nlohmann::json::array({"answer-leak"}));
}

TEST_F(CliTest, ProbeWithOracleScoresOne) {
  auto traces = path("t.jsonl");
  ASSERT_EQ(run({"generate", "--context", fixture_path("star_contexts.jsonl"), "--d", "3", "--out", traces}).code, 0);
  auto out = path("probe.json");
  ASSERT_EQ(run({"probe", "--traces", traces, "--qa-backend", "oracle", "--out", out}).code, 0);
  auto rep = nlohmann::json::parse(read_file(out));
  ASSERT_FALSE(rep["buckets"].empty());
  for (const auto& b : rep["buckets"]) EXPECT_DOUBLE_EQ(b["em"].get<double>(), 1.0);
}

TEST_F(CliTest, AugmentCountsLines) {
  auto traces = path("t.jsonl");
  ASSERT_EQ(run({"generate", "--context", fixture_path("fig1_context.json"), "--d", "1", "--all-answers", "--out", traces})
                .code,
            0);
  std::size_t generated = jsonl(traces).size();
  auto out = path("aug.jsonl");
  ASSERT_EQ(run({"augment", "--generated", traces, "--hotpot", fixture_path("hotpot_fixture.json"), "--ratio", "2",
                 "--out", out})
                .code,
            0);
  auto lines = jsonl(out);
  std::size_t originals = 0;
  for (const auto& l : lines) originals += l["source"] == "original";
  EXPECT_EQ(lines.size() - originals, generated);
  EXPECT_GE(originals, 2 * generated);
  EXPECT_EQ(run({"augment", "--generated", traces, "--hotpot", fixture_path("hotpot_fixture.json"), "--ratio", "0.5",
                 "--out", out})
                .code,
            2);
}

TEST_F(CliTest, ManifestOnlyRunsNothing) {
  auto out = path("t.jsonl"), manifest = path("m.json");
  auto r = run({"--manifest-only", "--manifest", manifest, "generate", "--context", fixture_path("fig1_context.json"),
                "--out", out});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_FALSE(fs::exists(out));
  auto m = nlohmann::json::parse(read_file(manifest));
  EXPECT_TRUE(m["manifest_only"].get<bool>());
  EXPECT_EQ(m["inputs"][0]["sha256"], digest_file(fixture_path("fig1_context.json")).sha256);
}
