#pragma once

// String helpers shared by the graph builder, templates, rule backends and
// metrics. ASCII-only case folding; bytes >= 0x80 are treated as word chars.

#include <algorithm>
#include <iterator>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hopqg::text {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline bool is_word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) != 0;
}

inline char lower_char(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower_char(c);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (lower_char(a[i]) != lower_char(b[i])) return false;
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string_view strip_edge_punct(std::string_view s) {
  while (!s.empty() && is_punct(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_punct(s.back())) s.remove_suffix(1);
  return s;
}

struct Word {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Whitespace-delimited words with their byte offsets.
inline std::vector<Word> words(std::string_view s) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size()) break;
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    out.push_back({b, i});
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  for (auto w : words(s)) out.emplace_back(s.substr(w.begin, w.end - w.begin));
  return out;
}

inline std::size_t word_count(std::string_view s) { return words(s).size(); }

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Lowercase and detach every ASCII punctuation char into its own token.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : s) {
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      cur += lower_char(c);
    }
  }
  flush();
  return out;
}

inline constexpr std::string_view kPronouns[] = {
    "i",     "me",    "my",     "mine",    "you",     "your",    "yours",  "he",
    "him",   "his",   "she",    "her",     "hers",    "it",      "its",    "we",
    "us",    "our",   "ours",   "they",    "them",    "their",   "theirs", "this",
    "that",  "these", "those",  "himself", "herself", "itself",  "themselves",
    "who",   "whom",  "which",  "one",     "someone", "ourselves", "yourself"};

inline bool is_pronoun(std::string_view s) {
  std::string l = to_lower(trim(s));
  return std::find(std::begin(kPronouns), std::end(kPronouns), l) != std::end(kPronouns);
}

inline constexpr std::string_view kStopwords[] = {
    "a",     "an",    "the",   "and",   "or",    "but",   "of",    "to",    "in",
    "on",    "at",    "by",    "for",   "with",  "from",  "as",    "into",  "about",
    "is",    "are",   "was",   "were",  "be",    "been",  "being", "am",    "do",
    "does",  "did",   "has",   "have",  "had",   "having","will",  "would", "can",
    "could", "should","may",   "might", "must",  "shall", "what",  "which", "who",
    "whom",  "whose", "when",  "where", "why",   "how",   "that",  "this",  "these",
    "those", "it",    "its",   "he",    "she",   "they",  "him",   "her",   "them",
    "his",   "their", "there", "here",  "than",  "then",  "so",    "such",  "not",
    "no",    "nor",   "too",   "very",  "also",  "both",  "each",  "other", "some",
    "any",   "all",   "most",  "more",  "s",     "if",    "while", "after", "before",
    "up",    "out"};

inline bool is_stopword(std::string_view lowered) {
  return std::find(std::begin(kStopwords), std::end(kStopwords), lowered) != std::end(kStopwords);
}

// Lowercased word with edge punctuation and a possessive 's removed.
inline std::string bare_word(std::string_view w) {
  std::string l = to_lower(strip_edge_punct(w));
  if (l.size() > 2 && (l.ends_with("'s") || l.ends_with("\xE2\x80\x99s"))) {
    l.erase(l.size() - (l.ends_with("'s") ? 2 : 4));
  }
  return std::string(strip_edge_punct(l));
}

// Crude suffix stripping used for stem matching: ies->y, then one of
// ing/ed/es/s/ly, and an undoubled final consonant (starred -> star).
inline std::string light_stem(std::string_view word) {
  std::string w = to_lower(word);
  auto strip = [&](std::string_view suf, std::size_t min_rest) {
    if (w.size() >= suf.size() + min_rest && w.ends_with(suf)) {
      w.erase(w.size() - suf.size());
      return true;
    }
    return false;
  };
  if (strip("ies", 2)) {
    w += 'y';
    return w;
  }
  bool stripped = strip("ing", 3) || strip("ed", 3);
  if (!stripped) {
    if (!strip("ly", 3) && !(w.size() > 3 && w.ends_with("ss"))) {
      if (!strip("es", 3)) strip("s", 3);
    }
    return w;
  }
  if (w.size() >= 3 && w[w.size() - 1] == w[w.size() - 2] &&
      std::string_view("aeiouslz").find(w.back()) == std::string_view::npos) {
    w.pop_back();
  }
  return w;
}

// Content words: bare words minus stopwords, in order, duplicates kept.
inline std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto w : words(s)) {
    std::string b = bare_word(s.substr(w.begin, w.end - w.begin));
    if (!b.empty() && !is_stopword(b)) out.push_back(std::move(b));
  }
  return out;
}

// First occurrence of `needle` in `hay` at word boundaries. Case-insensitive
// when `fold` is set.
inline std::optional<std::size_t> find_phrase(std::string_view hay, std::string_view needle,
                                              bool fold = false, std::size_t from = 0) {
  if (needle.empty() || needle.size() > hay.size()) return std::nullopt;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k) {
      char a = hay[i + k], b = needle[k];
      match = fold ? lower_char(a) == lower_char(b) : a == b;
    }
    if (!match) continue;
    bool left_ok = i == 0 || !is_word_char(hay[i - 1]) || !is_word_char(needle.front());
    std::size_t e = i + needle.size();
    bool right_ok = e == hay.size() || !is_word_char(hay[e]) || !is_word_char(needle.back());
    if (left_ok && right_ok) return i;
  }
  return std::nullopt;
}

inline bool contains_phrase(std::string_view hay, std::string_view needle, bool fold = false) {
  return find_phrase(hay, needle, fold).has_value();
}

inline bool is_capitalized(std::string_view w) {
  w = strip_edge_punct(w);
  if (w.empty()) return false;
  auto c = static_cast<unsigned char>(w.front());
  return std::isupper(c) != 0 || std::isdigit(c) != 0;
}

inline std::string capitalize_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace hopqg::text
