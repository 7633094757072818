#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hopqg {

enum class ErrorCode {
  InvalidInput,
  NotFound,
  Planning,
  InsufficientContext,
  RewriteInapplicable,
  Backend,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::Planning: return "planning";
    case ErrorCode::InsufficientContext: return "insufficient-context";
    case ErrorCode::RewriteInapplicable: return "rewrite-inapplicable";
    case ErrorCode::Backend: return "backend";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

// All library failures surface as hopqg::Error. `index` points at the offending
// element (triple, record, step) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(message), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

// Raised by prune() when the tree cannot supply d+1 nodes.
class InsufficientContextError : public Error {
 public:
  InsufficientContextError(const std::string& message, int max_d)
      : Error(ErrorCode::InsufficientContext, message), max_d_(max_d) {}
  int max_d() const noexcept { return max_d_; }

 private:
  int max_d_;
};

}  // namespace hopqg
