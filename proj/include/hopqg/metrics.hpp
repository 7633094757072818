#pragma once

// Corpus metrics over text::tokenize() tokens: BLEU-n, ROUGE-L, METEOR-s
// (exact + stem stages only) and CIDEr. Scores are fractions, not percentages.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hopqg/error.hpp"
#include "hopqg/text.hpp"

namespace hopqg {

struct CorpusItem {
  std::string hypothesis;
  std::vector<std::string> references;
};

using Corpus = std::vector<CorpusItem>;

inline constexpr std::string_view kTokenizerDescription =
    "lowercase; punctuation detached; whitespace split";

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string>, int>;

inline NgramCounts ngram_counts(const Tokens& toks, std::size_t n) {
  NgramCounts out;
  if (n == 0 || toks.size() < n) return out;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[Tokens(toks.begin() + i, toks.begin() + i + n)];
  return out;
}

namespace detail {

inline void check_corpus(const Corpus& c) {
  if (c.empty()) throw Error(ErrorCode::InvalidInput, "empty corpus");
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i].references.empty()) throw Error(ErrorCode::InvalidInput, "item has no references", i);
}

}  // namespace detail

// Corpus BLEU with uniform weights over orders 1..n, clipping by the maximum
// reference count and the closest reference length (shorter on ties).
inline double bleu(const Corpus& corpus, int n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidInput, "BLEU order must be in 1..4");
  detail::check_corpus(corpus);
  std::vector<double> matched(n, 0.0), total(n, 0.0);
  double hyp_len = 0, ref_len = 0;
  for (const auto& item : corpus) {
    Tokens h = text::tokenize(item.hypothesis);
    std::vector<Tokens> refs;
    for (const auto& r : item.references) refs.push_back(text::tokenize(r));
    hyp_len += static_cast<double>(h.size());
    std::size_t best = refs.front().size();
    for (const auto& r : refs) {
      auto diff = [&](std::size_t len) { return len > h.size() ? len - h.size() : h.size() - len; };
      if (diff(r.size()) < diff(best) || (diff(r.size()) == diff(best) && r.size() < best)) best = r.size();
    }
    ref_len += static_cast<double>(best);
    for (int k = 1; k <= n; ++k) {
      auto hc = ngram_counts(h, static_cast<std::size_t>(k));
      NgramCounts max_ref;
      for (const auto& r : refs)
        for (const auto& [g, c] : ngram_counts(r, static_cast<std::size_t>(k))) max_ref[g] = std::max(max_ref[g], c);
      for (const auto& [g, c] : hc) {
        auto it = max_ref.find(g);
        matched[k - 1] += std::min(c, it == max_ref.end() ? 0 : it->second);
        total[k - 1] += c;
      }
    }
  }
  double log_sum = 0;
  for (int k = 0; k < n; ++k) {
    if (matched[k] == 0 || total[k] == 0) return 0.0;
    log_sum += std::log(matched[k] / total[k]);
  }
  double bp = hyp_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / hyp_len);
  return bp * std::exp(log_sum / n);
}

// Bit-parallel LCS length (Hyyrö's formulation, multi-word).
inline std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  const std::size_t words = (a.size() + 63) / 64;
  std::unordered_map<std::string, std::vector<std::uint64_t>> masks;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto& m = masks[a[i]];
    if (m.empty()) m.assign(words, 0);
    m[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (const auto& tok : b) {
    auto it = masks.find(tok);
    if (it == masks.end()) continue;
    const auto& m = it->second;
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t u = v[w] & m[w];
      std::uint64_t sum = v[w] + u;
      std::uint64_t c1 = sum < v[w];
      std::uint64_t sum2 = sum + carry;
      std::uint64_t c2 = sum2 < sum;
      v[w] = sum2 | (v[w] & ~u);
      carry = c1 | c2;
    }
  }
  std::size_t ones = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = v[w];
    if (w + 1 == words && a.size() % 64) word &= (std::uint64_t{1} << (a.size() % 64)) - 1;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  return a.size() - ones;
}

inline double rouge_l_tokens(const Tokens& hyp, const Tokens& ref, double beta = 1.2) {
  if (hyp.empty() || ref.empty()) throw Error(ErrorCode::InvalidInput, "ROUGE-L needs non-empty strings");
  double lcs = static_cast<double>(lcs_length(ref, hyp));
  if (lcs == 0) return 0.0;
  double p = lcs / static_cast<double>(hyp.size());
  double r = lcs / static_cast<double>(ref.size());
  double b2 = beta * beta;
  return (1 + b2) * p * r / (r + b2 * p);
}

inline double rouge_l(std::string_view hyp, std::string_view ref, double beta = 1.2) {
  return rouge_l_tokens(text::tokenize(hyp), text::tokenize(ref), beta);
}

// Mean over items of the best score against any reference.
inline double rouge_l_corpus(const Corpus& corpus, double beta = 1.2) {
  detail::check_corpus(corpus);
  double sum = 0;
  for (const auto& item : corpus) {
    Tokens h = text::tokenize(item.hypothesis);
    double best = 0;
    for (const auto& r : item.references) best = std::max(best, rouge_l_tokens(h, text::tokenize(r), beta));
    sum += best;
  }
  return sum / static_cast<double>(corpus.size());
}

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

struct MeteorAlignment {
  int exact = 0;
  int matches = 0;
  int chunks = 0;
};

struct MeteorScore {
  double score = 0;
  double precision = 0;
  double recall = 0;
  double fmean = 0;
  double penalty = 0;
  MeteorAlignment alignment;
};

namespace detail {

// Best one-to-one alignment: most exact matches, then most matches overall
// (exact or shared light stem), then fewest chunks.
class MeteorAligner {
 public:
  MeteorAligner(const Tokens& h, const Tokens& r) : h_(h), r_(r), used_(r.size(), false) {
    for (const auto& t : h) hs_.push_back(text::light_stem(t));
    for (const auto& t : r) rs_.push_back(text::light_stem(t));
    suffix_exact_.assign(h.size() + 1, 0);
    suffix_any_.assign(h.size() + 1, 0);
    for (std::size_t i = h.size(); i-- > 0;) {
      bool ex = false, any = false;
      for (std::size_t j = 0; j < r.size(); ++j) {
        ex = ex || h[i] == r[j];
        any = any || h[i] == r[j] || hs_[i] == rs_[j];
      }
      suffix_exact_[i] = suffix_exact_[i + 1] + ex;
      suffix_any_[i] = suffix_any_[i + 1] + any;
    }
  }

  MeteorAlignment run() {
    best_ = {0, 0, 0};
    dfs(0, {0, 0, 0}, -2, -2);
    return best_;
  }

 private:
  static bool better(const MeteorAlignment& a, const MeteorAlignment& b) {
    if (a.exact != b.exact) return a.exact > b.exact;
    if (a.matches != b.matches) return a.matches > b.matches;
    return a.chunks < b.chunks;
  }

  void dfs(std::size_t i, MeteorAlignment cur, long last_i, long last_j) {
    MeteorAlignment bound{cur.exact + suffix_exact_[i], cur.matches + suffix_any_[i], cur.chunks};
    if (visited_any_ && !better(bound, best_)) return;
    if (i == h_.size()) {
      if (!visited_any_ || better(cur, best_)) best_ = cur;
      visited_any_ = true;
      return;
    }
    // Continuing the current chunk first finds low-chunk alignments early.
    std::vector<std::size_t> order;
    if (last_i == static_cast<long>(i) - 1 && last_j + 1 >= 0 && static_cast<std::size_t>(last_j + 1) < r_.size())
      order.push_back(static_cast<std::size_t>(last_j + 1));
    for (std::size_t j = 0; j < r_.size(); ++j)
      if (order.empty() || j != order.front()) order.push_back(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j : order) {
        if (used_[j]) continue;
        bool ex = h_[i] == r_[j];
        bool st = !ex && hs_[i] == rs_[j];
        if ((pass == 0 && !ex) || (pass == 1 && !st)) continue;
        used_[j] = true;
        MeteorAlignment next = cur;
        next.exact += ex;
        next.matches += 1;
        bool extends = last_i == static_cast<long>(i) - 1 && last_j == static_cast<long>(j) - 1;
        next.chunks += extends ? 0 : 1;
        dfs(i + 1, next, static_cast<long>(i), static_cast<long>(j));
        used_[j] = false;
      }
    }
    dfs(i + 1, cur, last_i, last_j);
  }

  const Tokens& h_;
  const Tokens& r_;
  Tokens hs_, rs_;
  std::vector<bool> used_;
  std::vector<int> suffix_exact_, suffix_any_;
  MeteorAlignment best_;
  bool visited_any_ = false;
};

}  // namespace detail

inline MeteorAlignment meteor_align(const Tokens& hyp, const Tokens& ref) {
  return detail::MeteorAligner(hyp, ref).run();
}

// Fragmentation penalty applies only to alignments split into two or more
// chunks, so identical strings score exactly 1.
inline MeteorScore meteor_from_alignment(const MeteorAlignment& a, std::size_t hyp_len, std::size_t ref_len,
                                         const MeteorParams& p = {}) {
  MeteorScore s;
  s.alignment = a;
  if (a.matches == 0) return s;
  double m = a.matches;
  s.precision = m / static_cast<double>(hyp_len);
  s.recall = m / static_cast<double>(ref_len);
  s.fmean = s.precision * s.recall / (p.alpha * s.precision + (1 - p.alpha) * s.recall);
  s.penalty = a.chunks > 1 ? p.gamma * std::pow(a.chunks / m, p.beta) : 0.0;
  s.score = s.fmean * (1 - s.penalty);
  return s;
}

inline MeteorScore meteor_simplified(std::string_view hyp, std::string_view ref, const MeteorParams& p = {}) {
  Tokens h = text::tokenize(hyp), r = text::tokenize(ref);
  if (h.empty() || r.empty()) throw Error(ErrorCode::InvalidInput, "METEOR-s needs non-empty strings");
  return meteor_from_alignment(meteor_align(h, r), h.size(), r.size(), p);
}

inline double meteor_corpus(const Corpus& corpus, const MeteorParams& p = {}) {
  detail::check_corpus(corpus);
  double sum = 0;
  for (const auto& item : corpus) {
    double best = 0;
    for (const auto& r : item.references) best = std::max(best, meteor_simplified(item.hypothesis, r, p).score);
    sum += best;
  }
  return sum / static_cast<double>(corpus.size());
}

struct CiderDetail {
  // [item][order-1]: cosine averaged over the item's references.
  std::vector<std::vector<double>> cosines;
  double score = 0;
};

// Raw n-gram counts weighted by log(N) - log(max(1, df)), where df counts the
// items whose references contain the n-gram. Per item: mean over orders 1..4
// of the reference-averaged cosine, times 10; corpus score is the item mean.
inline CiderDetail cider_detail(const Corpus& corpus) {
  detail::check_corpus(corpus);
  if (corpus.size() < 2) throw Error(ErrorCode::InvalidInput, "CIDEr needs at least two items");
  const double log_n = std::log(static_cast<double>(corpus.size()));
  std::vector<Tokens> hyps;
  std::vector<std::vector<Tokens>> refs;
  for (const auto& item : corpus) {
    hyps.push_back(text::tokenize(item.hypothesis));
    refs.emplace_back();
    for (const auto& r : item.references) refs.back().push_back(text::tokenize(r));
  }
  CiderDetail out;
  out.cosines.assign(corpus.size(), std::vector<double>(4, 0.0));
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<Tokens, int> df;
    for (const auto& rs : refs) {
      std::map<Tokens, bool> seen;
      for (const auto& r : rs)
        for (const auto& [g, c] : ngram_counts(r, n)) seen[g] = true;
      for (const auto& [g, b] : seen) ++df[g];
    }
    auto weight = [&](const NgramCounts& counts) {
      std::map<Tokens, double> v;
      for (const auto& [g, c] : counts) {
        auto it = df.find(g);
        double d = it == df.end() ? 1.0 : std::max(1, it->second);
        v[g] = c * (log_n - std::log(d));
      }
      return v;
    };
    auto norm = [](const std::map<Tokens, double>& v) {
      double s = 0;
      for (const auto& [g, x] : v) s += x * x;
      return std::sqrt(s);
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto hv = weight(ngram_counts(hyps[i], n));
      double hn = norm(hv);
      double sum = 0;
      for (const auto& r : refs[i]) {
        auto rv = weight(ngram_counts(r, n));
        double rn = norm(rv);
        if (hn == 0 || rn == 0) continue;
        double dot = 0;
        for (const auto& [g, x] : hv) {
          auto it = rv.find(g);
          if (it != rv.end()) dot += x * it->second;
        }
        sum += dot / (hn * rn);
      }
      out.cosines[i][n - 1] = sum / static_cast<double>(refs[i].size());
    }
  }
  double total = 0;
  for (const auto& c : out.cosines) total += 10.0 * (c[0] + c[1] + c[2] + c[3]) / 4.0;
  out.score = total / static_cast<double>(corpus.size());
  return out;
}

inline double cider(const Corpus& corpus) { return cider_detail(corpus).score; }

}  // namespace hopqg
