// hopqg: command-line front end for graph building, chain planning,
// question generation, dataset construction, filtering, evaluation, probing
// and augmentation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopqg/hopqg.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

struct Globals {
  std::optional<std::string> config;
  std::optional<std::string> manifest;
  bool manifest_only = false;
};

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hopqg::Error(hopqg::ErrorCode::Io, "cannot write " + path);
  return out;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw hopqg::Error(hopqg::ErrorCode::Io, "no such file: " + path);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hopqg::Error(hopqg::ErrorCode::Io, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

void warn(hopqg::RunManifest& m, const std::string& w) {
  std::cerr << "warning: " << w << "\n";
  m.warn(w);
}

// Manifest goes to --manifest, else <out>.manifest.json, else
// hopqg-<command>.manifest.json in the working directory.
std::string manifest_path(const Globals& g, const std::string& command, const std::optional<std::string>& out) {
  if (g.manifest) return *g.manifest;
  if (out) return *out + ".manifest.json";
  return "hopqg-" + command + ".manifest.json";
}

class Command {
 public:
  Command(std::string name, Globals& globals) : name_(std::move(name)), globals_(globals), manifest_(name_) {}
  virtual ~Command() = default;

  int execute() {
    int code = kExitOk;
    try {
      cfg_ = hopqg::load_config(globals_.config);
      manifest_.set_config(hopqg::config_to_json(cfg_));
      manifest_.set_arguments(arguments());
      manifest_.set_manifest_only(globals_.manifest_only);
      if (globals_.config) manifest_.add_input("config", *globals_.config);
      prepare();
      if (!globals_.manifest_only) code = run();
    } catch (const hopqg::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      code = e.code() == hopqg::ErrorCode::Backend ? kExitPartial : kExitInvalid;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      code = kExitInvalid;
    }
    manifest_.set_exit_code(code);
    try {
      manifest_.write(manifest_path(globals_, name_, output()));
    } catch (const std::exception& e) {
      std::cerr << "error: manifest: " << e.what() << "\n";
      if (code == kExitOk) code = kExitInvalid;
    }
    return code;
  }

 protected:
  // Validates inputs and records their digests.
  virtual void prepare() = 0;
  virtual int run() = 0;
  virtual json arguments() const = 0;
  virtual std::optional<std::string> output() const = 0;

  void input(const std::string& role, const std::string& path) {
    require_file(path);
    manifest_.add_input(role, path);
  }

  std::string name_;
  Globals& globals_;
  hopqg::PipelineConfig cfg_;
  hopqg::RunManifest manifest_;
};

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

// ---------------------------------------------------------------------------

class BuildGraphCommand : public Command {
 public:
  using Command::Command;
  std::string context, out;

  void bind(CLI::App* sub) {
    sub->add_option("--context", context, "annotated context JSON")->required();
    sub->add_option("--out", out, "graph JSON output")->required();
  }

 protected:
  json arguments() const override { return {{"context", context}, {"out", out}}; }
  std::optional<std::string> output() const override { return out; }
  void prepare() override { input("context", context); }

  int run() override {
    auto ctx = hopqg::context_from_json(hopqg::read_json_file(context));
    auto g = manifest_.timed("build_graph", [&] { return hopqg::build_context_graph(std::move(ctx)); });
    manifest_.count("triples", g.stats().triples);
    manifest_.count("nodes", g.nodes().size());
    manifest_.count("edges", g.edges().size());
    {
      auto f = open_out(out);
      f << hopqg::graph_to_json(g).dump(2) << '\n';
    }
    manifest_.add_output("graph", out);
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------

class PlanCommand : public Command {
 public:
  using Command::Command;
  std::string context, out;
  std::optional<int> d;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> answer;

  void bind(CLI::App* sub) {
    sub->add_option("--context", context, "annotated context JSON / JSONL")->required();
    sub->add_option("--d", d, "number of hops")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "answer-sampling seed");
    sub->add_option("--answer", answer, "answer text instead of a sampled answer node");
    sub->add_option("--out", out, "chain JSONL output")->required();
  }

 protected:
  json arguments() const override {
    return {{"context", context}, {"out", out}, {"d", d ? json(*d) : json(nullptr)},
            {"seed", seed ? json(*seed) : json(nullptr)}, {"answer", opt(answer)}};
  }
  std::optional<std::string> output() const override { return out; }
  void prepare() override {
    if (d) cfg_.d = *d;
    if (seed) cfg_.seed = *seed;
    manifest_.set_config(hopqg::config_to_json(cfg_));
    input("context", context);
  }

  int run() override {
    std::size_t failures = 0;
    {
      auto f = open_out(out);
      hopqg::JsonlWriter writer(f);
      hopqg::for_each_json_record(context, [&](json&& rec, std::size_t idx) {
        manifest_.count("contexts");
        std::string id = rec.is_object() && rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                                       : "ctx" + std::to_string(idx);
        try {
          auto g = hopqg::build_context_graph(hopqg::context_from_json(rec));
          std::optional<hopqg::NodeId> a;
          if (answer) a = hopqg::find_node(g, *answer);
          auto chain = manifest_.timed("plan", [&] {
            return hopqg::plan_chain(g, hopqg::DifficultyLevel(cfg_.d), hopqg::context_seed(cfg_.seed, idx), a);
          });
          manifest_.count("plans");
          writer.write({{"id", id}, {"chain", hopqg::chain_to_json(g, chain)}});
        } catch (const hopqg::InsufficientContextError& e) {
          manifest_.count("insufficient_context");
          warn(manifest_, id + ": " + e.what());
        } catch (const hopqg::Error& e) {
          ++failures;
          manifest_.count("failures");
          warn(manifest_, id + ": " + e.what());
        }
      });
    }
    manifest_.add_output("chains", out);
    return failures ? kExitPartial : kExitOk;
  }
};

// ---------------------------------------------------------------------------

class GenerateCommand : public Command {
 public:
  using Command::Command;
  std::string context, out;
  std::optional<int> d;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend, endpoint, answer;
  std::optional<std::size_t> workers;
  bool all_answers = false;

  void bind(CLI::App* sub) {
    sub->add_option("--context", context, "annotated context JSON / JSONL")->required();
    sub->add_option("--d", d, "number of hops")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "answer-sampling seed");
    sub->add_option("--backend", backend, "template | remote")->check(CLI::IsMember({"template", "remote"}));
    sub->add_option("--endpoint", endpoint, "generation service URL (remote backend)");
    auto* a = sub->add_option("--answer", answer, "answer text instead of a sampled answer node");
    sub->add_flag("--all-answers", all_answers, "one question per eligible answer node")->excludes(a);
    sub->add_option("--workers", workers, "contexts processed concurrently")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "trace JSONL output")->required();
  }

 protected:
  json arguments() const override {
    return {{"context", context},
            {"out", out},
            {"d", d ? json(*d) : json(nullptr)},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"backend", opt(backend)},
            {"endpoint", opt(endpoint)},
            {"answer", opt(answer)},
            {"all_answers", all_answers}};
  }
  std::optional<std::string> output() const override { return out; }

  void prepare() override {
    if (d) cfg_.d = *d;
    if (seed) cfg_.seed = *seed;
    if (backend) cfg_.generation.backend = *backend;
    if (endpoint) cfg_.generation.endpoint = *endpoint;
    if (workers) cfg_.workers = *workers;
    hopqg::validate(cfg_);
    manifest_.set_config(hopqg::config_to_json(cfg_));
    if (cfg_.generation.backend == "remote" && cfg_.generation.endpoint.empty())
      throw hopqg::Error(hopqg::ErrorCode::InvalidInput,
                         std::string("remote backend needs --endpoint or ") + hopqg::kEnvGenEndpoint);
    input("context", context);
  }

  int run() override {
    std::unique_ptr<hopqg::QuestionGenerator> gen;
    if (cfg_.generation.backend == "remote") {
      auto limiter = std::make_shared<hopqg::RequestLimiter>(cfg_.concurrency);
      gen = std::make_unique<hopqg::RemoteGenerator>(
          hopqg::JsonClient(hopqg::parse_endpoint(cfg_.generation.endpoint), cfg_.http, limiter), cfg_.generation.remote);
    } else {
      gen = std::make_unique<hopqg::TemplateGenerator>(cfg_.templates);
    }
    hopqg::GenerateOptions o;
    o.d = cfg_.d;
    o.seed = cfg_.seed;
    o.answer = answer;
    o.all_answers = all_answers;
    o.workers = cfg_.workers;
    hopqg::GenerateStats st;
    {
      auto f = open_out(out);
      st = manifest_.timed("generate", [&] { return hopqg::run_generation(context, *gen, f, o); });
    }
    manifest_.count("contexts", st.contexts);
    manifest_.count("questions", st.questions);
    manifest_.count("initial_calls", st.initial_calls);
    manifest_.count("rewrite_calls", st.rewrite_calls);
    manifest_.count("insufficient_context", st.insufficient_context);
    manifest_.count("failures", st.failures);
    for (const auto& w : st.warnings) warn(manifest_, w);
    manifest_.add_output("traces", out);
    return st.failures ? kExitPartial : kExitOk;
  }
};

// ---------------------------------------------------------------------------

class BuildDatasetCommand : public Command {
 public:
  using Command::Command;
  std::string hotpot, out;
  std::optional<std::string> backends, annotations, stats, skip_log;
  std::optional<std::size_t> workers;

  void bind(CLI::App* sub) {
    sub->add_option("--hotpot", hotpot, "HotpotQA JSON / JSONL")->required();
    sub->add_option("--backends", backends, "backend configuration JSON");
    sub->add_option("--annotations", annotations, "annotated contexts keyed by record id");
    sub->add_option("--out", out, "training-example JSONL output")->required();
    sub->add_option("--stats", stats, "stats JSON output (default <out>.stats.json)");
    sub->add_option("--skip-log", skip_log, "one line per skipped record");
    sub->add_option("--workers", workers, "records processed concurrently")->check(CLI::PositiveNumber);
  }

 protected:
  json arguments() const override {
    return {{"hotpot", hotpot},       {"out", out},           {"backends", opt(backends)},
            {"annotations", opt(annotations)}, {"stats", opt(stats)}, {"skip_log", opt(skip_log)}};
  }
  std::optional<std::string> output() const override { return out; }
  std::string stats_path() const { return stats ? *stats : out + ".stats.json"; }

  void prepare() override {
    if (backends) {
      input("backends", *backends);
      hopqg::merge_backends_file(cfg_, hopqg::read_json_file(*backends));
      hopqg::apply_env_overrides(cfg_);
    }
    if (workers) cfg_.workers = *workers;
    hopqg::validate(cfg_);
    manifest_.set_config(hopqg::config_to_json(cfg_));
    suite_ = hopqg::resolve_backends(hopqg::suite_config(cfg_));
    input("hotpot", hotpot);
    if (annotations) input("annotations", *annotations);
  }

  int run() override {
    hopqg::BuildOptions o;
    o.workers = cfg_.workers;
    if (annotations) o.annotations = load_annotations(*annotations);
    hopqg::BuildStats st;
    {
      auto f = open_out(out);
      std::optional<std::ofstream> log;
      if (skip_log) log = open_out(*skip_log);
      st = manifest_.timed("build_dataset",
                           [&] { return hopqg::build_dataset(hotpot, suite_, f, o, log ? &*log : nullptr); });
    }
    {
      auto f = open_out(stats_path());
      f << hopqg::stats_to_json(st).dump(2) << '\n';
    }
    manifest_.count("records_in", st.records_in);
    manifest_.count("emitted", st.emitted);
    for (const auto& [r, n] : st.skips) manifest_.count("skip:" + std::string(hopqg::to_string(r)), n);
    manifest_.add_output("examples", out);
    manifest_.add_output("stats", stats_path());
    auto bad = [&](hopqg::SkipReason r) {
      auto it = st.skips.find(r);
      return it != st.skips.end() && it->second > 0;
    };
    if (bad(hopqg::SkipReason::BackendError) || bad(hopqg::SkipReason::InvalidRecord)) return kExitPartial;
    return kExitOk;
  }

 private:
  // Records {"_id"|"id", "annotated_context"|"context"}, or one object
  // mapping id -> annotated context.
  static std::map<std::string, hopqg::AnnotatedContext> load_annotations(const std::string& path) {
    std::map<std::string, hopqg::AnnotatedContext> out;
    hopqg::for_each_json_record(path, [&](json&& rec, std::size_t) {
      if (!rec.is_object()) throw hopqg::Error(hopqg::ErrorCode::InvalidInput, path + ": annotation must be an object");
      const char* id_key = rec.contains("_id") ? "_id" : rec.contains("id") ? "id" : nullptr;
      const char* ctx_key = rec.contains("annotated_context") ? "annotated_context" : "context";
      if (id_key && rec.contains(ctx_key)) {
        const auto& idv = rec[id_key];
        out[idv.is_string() ? idv.get<std::string>() : idv.dump()] = hopqg::context_from_json(rec[ctx_key]);
        return;
      }
      for (auto& [k, v] : rec.items()) out[k] = hopqg::context_from_json(v);
    });
    return out;
  }

  hopqg::BackendSuite suite_;
};

// ---------------------------------------------------------------------------

class EvaluateCommand : public Command {
 public:
  using Command::Command;
  std::string hyp;
  std::vector<std::string> refs;
  std::string metrics = "bleu3,bleu4,rouge-l,meteor-s,cider";
  std::string format = "json";
  std::optional<std::string> out;

  void bind(CLI::App* sub) {
    sub->add_option("--hyp", hyp, "hypotheses, one per line")->required();
    sub->add_option("--ref", refs, "references, one per line; repeat for more references")->required();
    sub->add_option("--metrics", metrics, "comma-separated: bleu1..bleu4, rouge-l, meteor-s, cider, em, f1");
    sub->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--out", out, "report output (default stdout)");
  }

 protected:
  json arguments() const override {
    return {{"hyp", hyp}, {"ref", refs}, {"metrics", metrics}, {"format", format}, {"out", opt(out)}};
  }
  std::optional<std::string> output() const override { return out; }

  void prepare() override {
    names_ = hopqg::parse_metric_list(metrics);
    input("hyp", hyp);
    for (const auto& r : refs) input("ref", r);
  }

  int run() override {
    std::vector<std::vector<std::string>> ref_lines;
    for (const auto& r : refs) ref_lines.push_back(read_lines(r));
    auto corpus = hopqg::corpus_from_lines(read_lines(hyp), ref_lines);
    hopqg::EvaluationParams p{cfg_.rouge_beta, cfg_.meteor};
    auto report = manifest_.timed("evaluate", [&] { return hopqg::evaluate(corpus, names_, p); });
    manifest_.count("items", report.items);
    std::string text = format == "json" ? hopqg::report_to_json(report).dump(2) + "\n" : hopqg::report_to_table(report);
    if (out) {
      auto f = open_out(*out);
      f << text;
    } else {
      std::cout << text;
    }
    if (out) manifest_.add_output("report", *out);
    return kExitOk;
  }

 private:
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------

class FilterCommand : public Command {
 public:
  using Command::Command;
  std::string in, out;
  std::optional<std::string> dropped;
  std::optional<std::size_t> min_words, max_words;

  void bind(CLI::App* sub) {
    sub->add_option("--in", in, "JSONL with question and answer fields")->required();
    sub->add_option("--out", out, "kept records")->required();
    sub->add_option("--dropped", dropped, "dropped records with reasons");
    sub->add_option("--min-words", min_words, "shortest kept question (inclusive)");
    sub->add_option("--max-words", max_words, "longest kept question (inclusive)");
  }

 protected:
  json arguments() const override { return {{"in", in}, {"out", out}, {"dropped", opt(dropped)}}; }
  std::optional<std::string> output() const override { return out; }

  void prepare() override {
    if (min_words) cfg_.filter.min_words = *min_words;
    if (max_words) cfg_.filter.max_words = *max_words;
    hopqg::validate(cfg_);
    manifest_.set_config(hopqg::config_to_json(cfg_));
    input("in", in);
  }

  int run() override {
    std::size_t invalid = 0;
    {
      auto kept_f = open_out(out);
      std::optional<std::ofstream> drop_f;
      if (dropped) drop_f = open_out(*dropped);
      hopqg::JsonlWriter kept(kept_f);
      std::optional<hopqg::JsonlWriter> drop;
      if (drop_f) drop.emplace(*drop_f);
      hopqg::for_each_json_record(in, [&](json&& rec, std::size_t idx) {
        manifest_.count("input");
        if (!rec.is_object() || !rec.contains("question") || !rec.contains("answer") || !rec["question"].is_string() ||
            !rec["answer"].is_string()) {
          ++invalid;
          manifest_.count("invalid");
          warn(manifest_, in + ": record " + std::to_string(idx + 1) + " lacks string question/answer");
          return;
        }
        auto reasons = hopqg::filter_reasons(rec["question"].get<std::string>(), rec["answer"].get<std::string>(),
                                             cfg_.filter);
        if (reasons.empty()) {
          manifest_.count("kept");
          kept.write(rec);
          return;
        }
        manifest_.count("dropped");
        for (const auto& r : reasons) manifest_.count("dropped:" + r);
        if (drop) {
          rec["filter_reasons"] = reasons;
          drop->write(rec);
        }
      });
    }
    manifest_.add_output("kept", out);
    if (dropped) manifest_.add_output("dropped", *dropped);
    return invalid ? kExitPartial : kExitOk;
  }
};

// ---------------------------------------------------------------------------

class ProbeCommand : public Command {
 public:
  using Command::Command;
  std::string traces;
  std::string qa_backend = "oracle";
  std::optional<std::string> qa_endpoint, out;
  std::string format = "json";
  bool final_only = false;

  void bind(CLI::App* sub) {
    sub->add_option("--traces", traces, "trace JSONL from generate")->required();
    sub->add_option("--qa-backend", qa_backend, "oracle | empty | remote")
        ->check(CLI::IsMember({"oracle", "empty", "remote"}));
    sub->add_option("--qa-endpoint", qa_endpoint, "QA service URL (remote backend)");
    sub->add_flag("--final-only", final_only, "probe only final questions, not intermediates");
    sub->add_option("--format", format, "json | table")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--out", out, "report output (default stdout)");
  }

 protected:
  json arguments() const override {
    return {{"traces", traces}, {"qa_backend", qa_backend}, {"qa_endpoint", opt(qa_endpoint)},
            {"final_only", final_only}, {"format", format}, {"out", opt(out)}};
  }
  std::optional<std::string> output() const override { return out; }

  void prepare() override {
    if (qa_endpoint) cfg_.probe_endpoint = *qa_endpoint;
    manifest_.set_config(hopqg::config_to_json(cfg_));
    if (qa_backend == "remote" && cfg_.probe_endpoint.empty())
      throw hopqg::Error(hopqg::ErrorCode::InvalidInput,
                         std::string("remote QA backend needs --qa-endpoint or ") + hopqg::kEnvQaEndpoint);
    input("traces", traces);
  }

  int run() override {
    std::unique_ptr<hopqg::QaBackend> qa;
    if (qa_backend == "oracle") qa = std::make_unique<hopqg::OracleQa>();
    else if (qa_backend == "empty") qa = std::make_unique<hopqg::EmptyQa>();
    else
      qa = std::make_unique<hopqg::RemoteQa>(hopqg::JsonClient(hopqg::parse_endpoint(cfg_.probe_endpoint), cfg_.http,
                                                              std::make_shared<hopqg::RequestLimiter>(cfg_.concurrency)));
    std::vector<hopqg::ProbeItem> items;
    hopqg::for_each_json_record(traces, [&](json&& rec, std::size_t) {
      for (auto& it : hopqg::probe_items_from_trace(rec, !final_only)) items.push_back(std::move(it));
    });
    manifest_.count("items", items.size());
    auto r = manifest_.timed("probe", [&] {
      return hopqg::difficulty_probe(items, *qa, static_cast<std::size_t>(cfg_.concurrency));
    });
    manifest_.count("failures", r.failures);
    for (const auto& e : r.errors) warn(manifest_, e);
    std::string text = format == "json" ? hopqg::probe_to_json(r).dump(2) + "\n" : hopqg::probe_to_table(r);
    if (out) {
      auto f = open_out(*out);
      f << text;
    } else {
      std::cout << text;
    }
    if (out) manifest_.add_output("report", *out);
    return r.incomplete ? kExitPartial : kExitOk;
  }
};

// ---------------------------------------------------------------------------

class AugmentCommand : public Command {
 public:
  using Command::Command;
  std::string generated, hotpot, out;
  double ratio = 4.0;
  std::optional<std::uint64_t> seed;

  void bind(CLI::App* sub) {
    sub->add_option("--generated", generated, "generated traces JSONL (after filter)")->required();
    sub->add_option("--hotpot", hotpot, "original HotpotQA JSON / JSONL")->required();
    sub->add_option("--ratio", ratio, "minimum originals : generated ratio")->check(CLI::Range(1.0, 1e9));
    sub->add_option("--seed", seed, "shuffle seed");
    sub->add_option("--out", out, "QA training JSONL")->required();
  }

 protected:
  json arguments() const override {
    return {{"generated", generated}, {"hotpot", hotpot}, {"ratio", ratio},
            {"seed", seed ? json(*seed) : json(nullptr)}, {"out", out}};
  }
  std::optional<std::string> output() const override { return out; }

  void prepare() override {
    if (seed) cfg_.seed = *seed;
    manifest_.set_config(hopqg::config_to_json(cfg_));
    input("generated", generated);
    input("hotpot", hotpot);
  }

  int run() override {
    std::vector<hopqg::QaExample> gen, orig;
    hopqg::for_each_json_record(generated, [&](json&& rec, std::size_t) { gen.push_back(hopqg::qa_example_from_trace(rec)); });
    std::size_t invalid = 0;
    hopqg::for_each_json_record(hotpot, [&](json&& rec, std::size_t idx) {
      try {
        orig.push_back(hopqg::qa_example_from_hotpot(hopqg::hotpot_from_json(rec)));
      } catch (const hopqg::Error& e) {
        ++invalid;
        warn(manifest_, hotpot + ": record " + std::to_string(idx + 1) + ": " + e.what());
      }
    });
    hopqg::AugmentConfig c;
    c.ratio = ratio;
    c.seed = cfg_.seed;
    auto r = hopqg::emit_augmentation(gen, orig, c);
    {
      auto f = open_out(out);
      hopqg::JsonlWriter w(f);
      for (const auto& e : r.lines) w.write(hopqg::qa_example_to_json(e));
    }
    manifest_.count("generated", r.generated);
    manifest_.count("originals_in", orig.size());
    manifest_.count("originals_out", r.originals);
    manifest_.count("copies", r.copies);
    manifest_.count("lines", r.lines.size());
    manifest_.add_output("training", out);
    return invalid ? kExitPartial : kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopqg: difficulty-controllable multi-hop question generation"};
  app.set_version_flag("--version", std::string("hopqg ") + hopqg::kToolVersion);
  app.require_subcommand(1);

  Globals globals;
  app.add_option("--config", globals.config, "pipeline configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--manifest", globals.manifest, "run manifest path");
  app.add_flag("--manifest-only", globals.manifest_only, "validate inputs and write the manifest without running");

  BuildGraphCommand build_graph("build-graph", globals);
  PlanCommand plan("plan", globals);
  GenerateCommand generate("generate", globals);
  BuildDatasetCommand build_dataset("build-dataset", globals);
  EvaluateCommand evaluate("evaluate", globals);
  FilterCommand filter("filter", globals);
  ProbeCommand probe("probe", globals);
  AugmentCommand augment("augment", globals);

  std::map<CLI::App*, Command*> commands;
  auto add = [&](auto& cmd, const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    cmd.bind(sub);
    commands[sub] = &cmd;
  };
  add(build_graph, "build-graph", "annotated context -> context graph JSON");
  add(plan, "plan", "sample answer node and reasoning chain per context");
  add(generate, "generate", "plan + stepwise question generation per context");
  add(build_dataset, "build-dataset", "HotpotQA records -> training examples + stats");
  add(evaluate, "evaluate", "BLEU / ROUGE-L / METEOR-s / CIDEr / EM / F1 of hypotheses against references");
  add(filter, "filter", "drop generated pairs by length and answer leakage");
  add(probe, "probe", "QA accuracy per difficulty bucket");
  add(augment, "augment", "mix generated pairs with oversampled originals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  for (auto* sub : app.get_subcommands())
    if (auto it = commands.find(sub); it != commands.end()) return it->second->execute();
  return kExitInvalid;
}
