#pragma once

// Pipeline configuration: one JSON document, with endpoint overrides taken
// from the environment.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "hopqg/dataset_builder.hpp"
#include "hopqg/error.hpp"
#include "hopqg/filter.hpp"
#include "hopqg/generation.hpp"
#include "hopqg/http_client.hpp"
#include "hopqg/jsonl.hpp"
#include "hopqg/metrics.hpp"
#include "hopqg/templates.hpp"

namespace hopqg {

struct GenerationConfig {
  std::string backend = "template";  // template | remote
  std::string endpoint;
  RemoteGenerationOptions remote;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  int d = 2;
  int concurrency = 8;  // in-flight remote requests
  std::size_t workers = 1;
  HttpOptions http;
  GenerationConfig generation;
  TemplateConfig templates;
  FilterConfig filter;
  double rouge_beta = 1.2;
  MeteorParams meteor;
  BackendSpec type_classifier;
  BackendSpec decomposer;
  BackendSpec qa;
  std::string probe_endpoint;
};

inline constexpr const char* kEnvGenEndpoint = "HOPQG_GEN_ENDPOINT";
inline constexpr const char* kEnvTypeEndpoint = "HOPQG_TYPE_ENDPOINT";
inline constexpr const char* kEnvDecompEndpoint = "HOPQG_DECOMP_ENDPOINT";
inline constexpr const char* kEnvQaEndpoint = "HOPQG_QA_ENDPOINT";

namespace detail {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("config field \"") + key + "\": " + e.what());
  }
}

inline void read_backends(const nlohmann::json& j, PipelineConfig& cfg) {
  if (j.contains("type_classifier")) cfg.type_classifier = backend_spec_from_json(j["type_classifier"]);
  if (j.contains("decomposer")) cfg.decomposer = backend_spec_from_json(j["decomposer"]);
  if (j.contains("qa")) cfg.qa = backend_spec_from_json(j["qa"]);
}

inline std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace detail

inline void validate(const PipelineConfig& cfg) {
  if (cfg.d < 1) throw Error(ErrorCode::InvalidInput, "config: d must be >= 1");
  if (cfg.concurrency < 1) throw Error(ErrorCode::InvalidInput, "config: concurrency must be >= 1");
  if (cfg.workers < 1) throw Error(ErrorCode::InvalidInput, "config: workers must be >= 1");
  if (cfg.http.retries < 0) throw Error(ErrorCode::InvalidInput, "config: http.retries must be >= 0");
  if (cfg.filter.min_words > cfg.filter.max_words)
    throw Error(ErrorCode::InvalidInput, "config: filter.min_words exceeds filter.max_words");
  if (cfg.generation.backend != "template" && cfg.generation.backend != "remote")
    throw Error(ErrorCode::InvalidInput, "config: generation.backend must be template or remote");
  if (!(cfg.generation.remote.top_p > 0 && cfg.generation.remote.top_p <= 1))
    throw Error(ErrorCode::InvalidInput, "config: generation.top_p must be in (0, 1]");
  if (cfg.rouge_beta <= 0) throw Error(ErrorCode::InvalidInput, "config: metrics.rouge_beta must be > 0");
}

inline void apply_env_overrides(PipelineConfig& cfg) {
  if (auto v = detail::env(kEnvGenEndpoint)) cfg.generation.endpoint = *v;
  if (auto v = detail::env(kEnvTypeEndpoint)) cfg.type_classifier.endpoint = *v;
  if (auto v = detail::env(kEnvDecompEndpoint)) cfg.decomposer.endpoint = *v;
  if (auto v = detail::env(kEnvQaEndpoint)) {
    cfg.qa.endpoint = *v;
    if (cfg.probe_endpoint.empty()) cfg.probe_endpoint = *v;
  }
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "config must be a JSON object");
  PipelineConfig cfg;
  detail::read_if(j, "seed", cfg.seed);
  detail::read_if(j, "d", cfg.d);
  detail::read_if(j, "concurrency", cfg.concurrency);
  detail::read_if(j, "workers", cfg.workers);
  if (j.contains("http")) {
    const auto& h = j["http"];
    detail::read_if(h, "retries", cfg.http.retries);
    long ms = cfg.http.timeout.count();
    detail::read_if(h, "timeout_ms", ms);
    cfg.http.timeout = std::chrono::milliseconds(ms);
    long backoff = cfg.http.backoff.count();
    detail::read_if(h, "backoff_ms", backoff);
    cfg.http.backoff = std::chrono::milliseconds(backoff);
  }
  if (j.contains("generation")) {
    const auto& g = j["generation"];
    detail::read_if(g, "backend", cfg.generation.backend);
    detail::read_if(g, "endpoint", cfg.generation.endpoint);
    detail::read_if(g, "top_p", cfg.generation.remote.top_p);
    detail::read_if(g, "max_tokens", cfg.generation.remote.max_tokens);
  }
  if (j.contains("templates")) {
    const auto& t = j["templates"];
    detail::read_if(t, "wh_person", cfg.templates.wh_person);
    detail::read_if(t, "wh_location", cfg.templates.wh_location);
    detail::read_if(t, "wh_other", cfg.templates.wh_other);
    std::map<std::string, std::string> by_type;
    detail::read_if(t, "wh_by_type", by_type);
    for (auto& [k, v] : by_type) {
      std::string upper;
      for (char c : k) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      cfg.templates.wh_by_type[upper] = v;
    }
  }
  if (j.contains("filter")) {
    detail::read_if(j["filter"], "min_words", cfg.filter.min_words);
    detail::read_if(j["filter"], "max_words", cfg.filter.max_words);
  }
  if (j.contains("metrics")) {
    const auto& m = j["metrics"];
    detail::read_if(m, "rouge_beta", cfg.rouge_beta);
    if (m.contains("meteor")) {
      detail::read_if(m["meteor"], "alpha", cfg.meteor.alpha);
      detail::read_if(m["meteor"], "beta", cfg.meteor.beta);
      detail::read_if(m["meteor"], "gamma", cfg.meteor.gamma);
    }
  }
  if (j.contains("backends")) detail::read_backends(j["backends"], cfg);
  if (j.contains("probe")) detail::read_if(j["probe"], "endpoint", cfg.probe_endpoint);
  return cfg;
}

// Backend description files may be a full config or just the "backends"
// object.
inline void merge_backends_file(PipelineConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "backends file must be a JSON object");
  detail::read_backends(j.contains("backends") ? j["backends"] : j, cfg);
  if (j.contains("concurrency")) detail::read_if(j, "concurrency", cfg.concurrency);
}

inline nlohmann::json config_to_json(const PipelineConfig& cfg) {
  auto spec = [](const BackendSpec& s) {
    return nlohmann::json{{"kind", s.kind}, {"endpoint", s.endpoint}, {"fallback", s.fallback}};
  };
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["d"] = cfg.d;
  j["concurrency"] = cfg.concurrency;
  j["workers"] = cfg.workers;
  j["http"] = {{"retries", cfg.http.retries},
               {"timeout_ms", cfg.http.timeout.count()},
               {"backoff_ms", cfg.http.backoff.count()}};
  j["generation"] = {{"backend", cfg.generation.backend},
                     {"endpoint", cfg.generation.endpoint},
                     {"top_p", cfg.generation.remote.top_p},
                     {"max_tokens", cfg.generation.remote.max_tokens}};
  j["templates"] = {{"wh_person", cfg.templates.wh_person},
                    {"wh_location", cfg.templates.wh_location},
                    {"wh_other", cfg.templates.wh_other},
                    {"wh_by_type", cfg.templates.wh_by_type}};
  j["filter"] = {{"min_words", cfg.filter.min_words}, {"max_words", cfg.filter.max_words}};
  j["metrics"] = {{"rouge_beta", cfg.rouge_beta},
                  {"meteor", {{"alpha", cfg.meteor.alpha}, {"beta", cfg.meteor.beta}, {"gamma", cfg.meteor.gamma}}},
                  {"tokenizer", kTokenizerDescription}};
  j["backends"] = {{"type_classifier", spec(cfg.type_classifier)},
                   {"decomposer", spec(cfg.decomposer)},
                   {"qa", spec(cfg.qa)}};
  j["probe"] = {{"endpoint", cfg.probe_endpoint}};
  return j;
}

inline PipelineConfig load_config(const std::optional<std::string>& path) {
  PipelineConfig cfg = path ? config_from_json(read_json_file(*path)) : PipelineConfig{};
  apply_env_overrides(cfg);
  validate(cfg);
  return cfg;
}

inline BackendSuiteConfig suite_config(const PipelineConfig& cfg) {
  BackendSuiteConfig s;
  s.type_classifier = cfg.type_classifier;
  s.decomposer = cfg.decomposer;
  s.qa = cfg.qa;
  s.concurrency = cfg.concurrency;
  s.http = cfg.http;
  return s;
}

}  // namespace hopqg
