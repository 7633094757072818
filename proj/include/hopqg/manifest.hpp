#pragma once

// Run manifest written next to every command's output: config snapshot,
// input/output digests, tool version, per-stage counts and timings.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "hopqg/error.hpp"

#ifndef HOPQG_VERSION
#define HOPQG_VERSION "0.0.0"
#endif

namespace hopqg {

inline constexpr const char* kToolVersion = HOPQG_VERSION;

inline std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out += kDigits[data[i] >> 4];
    out += kDigits[data[i] & 0xf];
  }
  return out;
}

struct FileDigest {
  std::string sha256;
  std::size_t bytes = 0;
  std::size_t lines = 0;
};

inline FileDigest digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Io, "sha256 init failed");
  FileDigest d;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    d.bytes += got;
    for (std::size_t i = 0; i < got; ++i) d.lines += buf[i] == '\n';
    if (EVP_DigestUpdate(ctx.get(), buf.data(), got) != 1) throw Error(ErrorCode::Io, "sha256 update failed");
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) throw Error(ErrorCode::Io, "sha256 final failed");
  d.sha256 = to_hex(md, len);
  return d;
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Io, "sha256 failed");
  return to_hex(md, len);
}

class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)), start_(Clock::now()) {}

  void set_config(nlohmann::json cfg) { config_ = std::move(cfg); }
  void set_arguments(nlohmann::json args) { arguments_ = std::move(args); }

  void add_input(const std::string& role, const std::string& path) {
    auto d = digest_file(path);
    inputs_.push_back({{"role", role}, {"path", path}, {"sha256", d.sha256}, {"bytes", d.bytes}});
  }

  void add_output(const std::string& role, const std::string& path) {
    auto d = digest_file(path);
    outputs_.push_back(
        {{"role", role}, {"path", path}, {"sha256", d.sha256}, {"bytes", d.bytes}, {"lines", d.lines}});
  }

  void count(const std::string& stage, std::size_t n = 1) { stages_[stage]["count"] = stage_count(stage) + n; }

  // Adds the elapsed time of `fn` to `stage` and returns its result.
  template <class Fn>
  auto timed(const std::string& stage, Fn&& fn) {
    auto t0 = Clock::now();
    struct Guard {
      RunManifest& m;
      const std::string& stage;
      Clock::time_point t0;
      ~Guard() { m.add_ms(stage, std::chrono::duration<double, std::milli>(Clock::now() - t0).count()); }
    } guard{*this, stage, t0};
    return fn();
  }

  void warn(std::string w) { warnings_.push_back(std::move(w)); }
  std::size_t warnings() const { return warnings_.size(); }
  void set_exit_code(int c) { exit_code_ = c; }
  void set_manifest_only(bool b) { manifest_only_ = b; }

  std::size_t stage_count(const std::string& stage) const {
    auto it = stages_.find(stage);
    if (it == stages_.end() || !it->second.contains("count")) return 0;
    return it->second["count"].get<std::size_t>();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tool"] = "hopqg";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["arguments"] = arguments_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["stages"] = nlohmann::json::object();
    for (const auto& [k, v] : stages_) j["stages"][k] = v;
    j["warnings"] = warnings_;
    j["manifest_only"] = manifest_only_;
    j["exit_code"] = exit_code_;
    j["elapsed_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return j;
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << to_json().dump(2) << '\n';
  }

 private:
  using Clock = std::chrono::steady_clock;

  void add_ms(const std::string& stage, double ms) {
    auto& s = stages_[stage];
    if (!s.is_object()) s = nlohmann::json::object();
    s["ms"] = s.value("ms", 0.0) + ms;
  }

  std::string command_;
  Clock::time_point start_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json arguments_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  std::map<std::string, nlohmann::json> stages_;
  std::vector<std::string> warnings_;
  bool manifest_only_ = false;
  int exit_code_ = 0;
};

}  // namespace hopqg
