#pragma once

// JSON-over-HTTP POST client shared by every remote backend. Retries transport
// failures and 5xx replies; a process-wide semaphore bounds in-flight requests.

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "hopqg/error.hpp"

namespace hopqg {

struct Endpoint {
  std::string scheme = "http";
  std::string host;
  int port = 80;
  std::string path = "/";

  std::string base() const { return scheme + "://" + host + ":" + std::to_string(port); }
  std::string str() const { return base() + path; }
};

inline Endpoint parse_endpoint(std::string_view url) {
  Endpoint ep;
  auto sep = url.find("://");
  if (sep == std::string_view::npos) throw Error(ErrorCode::InvalidInput, "endpoint needs a scheme: " + std::string(url));
  ep.scheme = std::string(url.substr(0, sep));
  if (ep.scheme != "http" && ep.scheme != "https")
    throw Error(ErrorCode::InvalidInput, "unsupported endpoint scheme: " + ep.scheme);
  url.remove_prefix(sep + 3);
  auto slash = url.find('/');
  std::string_view authority = url.substr(0, slash);
  ep.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    ep.host = std::string(authority.substr(0, colon));
    try {
      ep.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad port in endpoint: " + std::string(authority));
    }
  } else {
    ep.host = std::string(authority);
    ep.port = ep.scheme == "https" ? 443 : 80;
  }
  if (ep.host.empty()) throw Error(ErrorCode::InvalidInput, "endpoint has no host");
  return ep;
}

struct HttpOptions {
  int retries = 2;  // attempts after the first
  std::chrono::milliseconds timeout{30000};
  std::chrono::milliseconds backoff{100};
};

class RequestLimiter {
 public:
  explicit RequestLimiter(int cap) : sem_(cap < 1 ? 1 : cap) {}
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<1 << 16> sem_;
};

class JsonClient {
 public:
  JsonClient(Endpoint ep, HttpOptions opts = {}, std::shared_ptr<RequestLimiter> limiter = nullptr)
      : ep_(std::move(ep)), opts_(opts), limiter_(std::move(limiter)) {}

  const Endpoint& endpoint() const { return ep_; }

  nlohmann::json post(const nlohmann::json& body) const {
    if (limiter_) limiter_->acquire();
    struct Release {
      RequestLimiter* l;
      ~Release() {
        if (l) l->release();
      }
    } guard{limiter_.get()};

    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= opts_.retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(opts_.backoff * attempt);
      httplib::Client cli(ep_.base());
      auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
      auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opts_.timeout - secs);
      cli.set_connection_timeout(secs.count(), usecs.count());
      cli.set_read_timeout(secs.count(), usecs.count());
      cli.set_write_timeout(secs.count(), usecs.count());
      auto res = cli.Post(ep_.path, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300)
        throw Error(ErrorCode::Backend, ep_.str() + ": HTTP " + std::to_string(res->status));
      try {
        auto j = nlohmann::json::parse(res->body);
        if (!j.is_object()) throw Error(ErrorCode::Backend, ep_.str() + ": response is not a JSON object");
        return j;
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Backend, ep_.str() + ": malformed response: " + e.what());
      }
    }
    throw Error(ErrorCode::Backend, ep_.str() + ": " + last_error + " after " +
                                        std::to_string(opts_.retries + 1) + " attempts");
  }

  // Required non-empty string field of the reply.
  std::string post_for_string(const nlohmann::json& body, const std::string& field) const {
    auto j = post(body);
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
      throw Error(ErrorCode::Backend, ep_.str() + ": response lacks string field \"" + field + "\"");
    return it->get<std::string>();
  }

 private:
  Endpoint ep_;
  HttpOptions opts_;
  std::shared_ptr<RequestLimiter> limiter_;
};

}  // namespace hopqg
