#pragma once

// Streaming readers for JSON documents, JSON arrays of records and JSONL,
// with line:column positions on parse errors.

#include <cstddef>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "hopqg/error.hpp"

namespace hopqg {

class JsonInputError : public Error {
 public:
  JsonInputError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorCode::InvalidInput,
              source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// 1-based line and column of byte offset `byte` (counted from 1 as nlohmann
// reports it) within `text`.
inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  std::size_t stop = byte == 0 ? 0 : std::min(byte - 1, text.size());
  for (std::size_t i = 0; i < stop; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte);
    throw JsonInputError(source, line, col, e.what());
  }
}

inline nlohmann::json read_json_file(const std::string& path) { return parse_json_text(read_text_file(path), path); }

namespace detail {

inline int first_significant_char(std::istream& in) {
  while (true) {
    int c = in.peek();
    if (c == EOF) return EOF;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
      continue;
    }
    return c;
  }
}

}  // namespace detail

// Calls fn(record, index) for each record of a top-level JSON array, or for
// each non-blank line of JSONL input. A lone top-level object counts as one
// record. Array input is parsed incrementally and records are released as
// soon as fn returns.
inline std::size_t for_each_json_record(const std::string& path,
                                        const std::function<void(nlohmann::json&&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::size_t count = 0;
  int first = detail::first_significant_char(in);
  if (first == EOF) return 0;

  auto fail_at = [&](std::size_t byte, const std::string& what) -> void {
    auto [line, col] = line_column(read_text_file(path), byte);
    throw JsonInputError(path, line, col, what);
  };

  if (first == '[') {
    in.seekg(0);
    nlohmann::json::parser_callback_t cb = [&](int depth, nlohmann::json::parse_event_t event,
                                               nlohmann::json& parsed) {
      if (depth == 1 && (event == nlohmann::json::parse_event_t::object_end ||
                         event == nlohmann::json::parse_event_t::array_end ||
                         event == nlohmann::json::parse_event_t::value)) {
        if (event == nlohmann::json::parse_event_t::value && (parsed.is_object() || parsed.is_array())) return true;
        fn(std::move(parsed), count++);
        return false;
      }
      return true;
    };
    try {
      auto rest = nlohmann::json::parse(in, cb);
      (void)rest;
    } catch (const nlohmann::json::parse_error& e) {
      fail_at(e.byte, e.what());
    }
    return count;
  }

  if (first == '{') {
    // Either one object or JSONL: decide per line.
    in.seekg(0);
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      if (line_no == 1 && count == 0) {
        // A pretty-printed single document spans lines.
        auto whole = read_json_file(path);
        if (whole.is_array()) {
          for (auto& r : whole) fn(std::move(r), count++);
        } else {
          fn(std::move(whole), count++);
        }
        return count;
      }
      throw JsonInputError(path, line_no, e.byte == 0 ? 1 : e.byte, e.what());
    }
    fn(std::move(j), count++);
  }
  return count;
}

class JsonlWriter {
 public:
  explicit JsonlWriter(std::ostream& out) : out_(out) {}
  void write(const nlohmann::json& j) {
    out_ << j.dump() << '\n';
    ++lines_;
  }
  std::size_t lines() const { return lines_; }

 private:
  std::ostream& out_;
  std::size_t lines_ = 0;
};

}  // namespace hopqg
