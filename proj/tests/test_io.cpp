#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hopqg/config.hpp"
#include "hopqg/jsonl.hpp"
#include "hopqg/manifest.hpp"

using namespace hopqg;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("hopqg_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& body) const {
    auto p = (path_ / name).string();
    std::ofstream(p, std::ios::binary) << body;
    return p;
  }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::vector<nlohmann::json> records(const std::string& path) {
  std::vector<nlohmann::json> out;
  for_each_json_record(path, [&](nlohmann::json&& j, std::size_t) { out.push_back(std::move(j)); });
  return out;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST(JsonRecords, JsonlArrayAndPrettyDocument) {
  TempDir dir;
  EXPECT_EQ(records(dir.write("a.jsonl", "{\"id\":1}\n\n{\"id\":2}\r\n{\"id\":3}\n")).size(), 3u);
  auto arr = records(dir.write("b.json", "[\n  {\"id\": 1, \"x\": [1, 2]},\n  {\"id\": 2}\n]\n"));
  ASSERT_EQ(arr.size(), 2u);
  EXPECT_EQ(arr[0]["x"].size(), 2u);
  auto doc = records(dir.write("c.json", "{\n  \"id\": \"one\",\n  \"nodes\": []\n}\n"));
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc[0]["id"], "one");
  EXPECT_EQ(records(dir.write("d.json", "  \n")).size(), 0u);
}

TEST(JsonRecords, ErrorsCarryLineAndColumn) {
  TempDir dir;
  auto jsonl = dir.write("bad.jsonl", "{\"id\":1}\n{\"id\":,}\n");
  try {
    records(jsonl);
    FAIL() << "expected a parse error";
  } catch (const JsonInputError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 7u);
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:2:7:"), std::string::npos);
  }
  auto arr = dir.write("bad.json", "[\n  {\"id\": 1},\n  {\"id\" 2}\n]\n");
  try {
    records(arr);
    FAIL() << "expected a parse error";
  } catch (const JsonInputError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
  EXPECT_THROW(records(dir.write("missing_dir_marker", "") + ".nope"), Error);
}

TEST(JsonRecords, LineColumnOracle) {
  std::string text = "ab\ncd\nef";
  EXPECT_EQ(line_column(text, 1), (std::pair<std::size_t, std::size_t>{1, 1}));
  EXPECT_EQ(line_column(text, 5), (std::pair<std::size_t, std::size_t>{2, 2}));
  EXPECT_EQ(line_column(text, 7), (std::pair<std::size_t, std::size_t>{3, 1}));
}

TEST(Config, DefaultsValidateAndRoundTrip) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  EXPECT_DOUBLE_EQ(cfg.generation.remote.top_p, 0.9);
  EXPECT_EQ(cfg.filter.min_words, 6u);
  EXPECT_EQ(cfg.filter.max_words, 30u);
  auto j = config_to_json(cfg);
  auto back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
}

TEST(Config, FieldsAndValidation) {
  auto cfg = config_from_json(nlohmann::json::parse(R"({
    "seed": 9, "d": 3, "templates": {"wh_by_type": {"work_of_art": "Which film"}},
    "backends": {"qa": {"kind": "remote", "endpoint": "http://127.0.0.1:1/qa", "fallback": false}}
  })"));
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.d, 3);
  EXPECT_EQ(cfg.templates.wh_by_type.at("WORK_OF_ART"), "Which film");
  EXPECT_EQ(cfg.qa.kind, "remote");
  EXPECT_FALSE(cfg.qa.fallback);

  EXPECT_THROW(config_from_json(nlohmann::json::array()), Error);
  EXPECT_THROW(config_from_json(nlohmann::json{{"d", "two"}}), Error);
  auto bad = [](auto mutate) {
    PipelineConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), Error);
  };
  bad([](PipelineConfig& c) { c.d = 0; });
  bad([](PipelineConfig& c) { c.concurrency = 0; });
  bad([](PipelineConfig& c) { c.filter.min_words = 31; });
  bad([](PipelineConfig& c) { c.generation.backend = "llm"; });
  bad([](PipelineConfig& c) { c.generation.remote.top_p = 0; });
}

TEST(Config, EnvironmentOverridesEndpoints) {
  ScopedEnv gen(kEnvGenEndpoint, "http://gen.local/g");
  ScopedEnv qa(kEnvQaEndpoint, "http://qa.local/q");
  PipelineConfig cfg;
  cfg.qa.endpoint = "http://file.local/q";
  apply_env_overrides(cfg);
  EXPECT_EQ(cfg.generation.endpoint, "http://gen.local/g");
  EXPECT_EQ(cfg.qa.endpoint, "http://qa.local/q");
  EXPECT_EQ(cfg.probe_endpoint, "http://qa.local/q");
  EXPECT_TRUE(cfg.decomposer.endpoint.empty());
}

TEST(Config, BackendsFileMayBeBare) {
  PipelineConfig cfg;
  merge_backends_file(cfg, nlohmann::json::parse(R"({"decomposer": {"kind": "remote", "endpoint": "http://d"}})"));
  EXPECT_EQ(cfg.decomposer.endpoint, "http://d");
  merge_backends_file(cfg, nlohmann::json::parse(R"({"backends": {"qa": {"kind": "rule"}}, "concurrency": 2})"));
  EXPECT_EQ(cfg.qa.kind, "rule");
  EXPECT_EQ(cfg.concurrency, 2);
}

TEST(Manifest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  TempDir dir;
  auto d = digest_file(dir.write("abc.txt", "abc"));
  EXPECT_EQ(d.sha256, sha256_hex("abc"));
  EXPECT_EQ(d.bytes, 3u);
  EXPECT_EQ(digest_file(dir.write("l.txt", "a\nb\n")).lines, 2u);
}

TEST(Manifest, RecordsStagesDigestsAndExitCode) {
  TempDir dir;
  auto in = dir.write("in.txt", "abc");
  RunManifest m("generate");
  m.add_input("context", in);
  m.count("initial_calls", 3);
  m.count("initial_calls");
  int v = m.timed("plan", [] { return 7; });
  EXPECT_EQ(v, 7);
  m.warn("insufficient context");
  m.set_exit_code(1);
  auto j = m.to_json();
  EXPECT_EQ(j["command"], "generate");
  EXPECT_EQ(j["version"], kToolVersion);
  EXPECT_EQ(j["inputs"][0]["sha256"], sha256_hex("abc"));
  EXPECT_EQ(j["stages"]["initial_calls"]["count"], 4);
  EXPECT_TRUE(j["stages"]["plan"].contains("ms"));
  EXPECT_EQ(j["warnings"].size(), 1u);
  EXPECT_EQ(j["exit_code"], 1);
  auto out = dir.write("m.json", "");
  m.write(out);
  EXPECT_EQ(read_json_file(out)["command"], "generate");
}
