#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "hopqg/metrics.hpp"
#include "hopqg/squad.hpp"
#include "metric_oracles.hpp"

using namespace hopqg;

namespace {

Corpus random_corpus(std::mt19937_64& rng, std::size_t items) {
  Corpus c;
  for (std::size_t i = 0; i < items; ++i) {
    CorpusItem it;
    it.hypothesis = oracle::random_sentence(rng, 1, 12, 10);
    std::size_t refs = 1 + rng() % 3;
    for (std::size_t k = 0; k < refs; ++k) it.references.push_back(oracle::random_sentence(rng, 1, 12, 10));
    c.push_back(std::move(it));
  }
  return c;
}

}  // namespace

TEST(Bleu, IdentityAndDisjoint) {
  Corpus same = {{"who directed the film ?", {"who directed the film ?"}}};
  for (int n = 1; n <= 4; ++n) EXPECT_DOUBLE_EQ(bleu(same, n), 1.0);
  EXPECT_EQ(bleu({{"a b c", {"d e f"}}}, 1), 0.0);
  EXPECT_THROW((void)bleu({}, 4), Error);
  EXPECT_THROW((void)bleu(same, 5), Error);
}

TEST(Bleu, MatchesOracle) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_corpus(rng, 1 + rng() % 6);
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(bleu(c, n), oracle::bleu(c, n), 1e-9);
  }
}

TEST(Bleu, BrevityPenalty) {
  // 2 of 4 reference tokens, all unigrams correct: BP = exp(1 - 4/2).
  EXPECT_NEAR(bleu({{"the film", {"the film was remade"}}}, 1), std::exp(-1.0), 1e-12);
}

TEST(RougeL, IdentityDisjointAndErrors) {
  EXPECT_DOUBLE_EQ(rouge_l("Who starred Top Gun?", "who starred top gun ?"), 1.0);
  EXPECT_EQ(rouge_l("a b c", "d e f"), 0.0);
  EXPECT_THROW((void)rouge_l("", "a"), Error);
}

TEST(RougeL, LcsMatchesDynamicProgramming) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = text::tokenize(oracle::random_sentence(rng, 1, 150, 6));
    auto b = text::tokenize(oracle::random_sentence(rng, 1, 150, 6));
    ASSERT_EQ(lcs_length(a, b), oracle::lcs(a, b));
  }
}

TEST(RougeL, MatchesOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_corpus(rng, 1 + rng() % 6);
    double want = 0;
    for (const auto& it : c) {
      double best = 0;
      for (const auto& r : it.references)
        best = std::max(best, oracle::rouge_l(text::tokenize(it.hypothesis), text::tokenize(r), 1.2));
      want += best;
    }
    EXPECT_NEAR(rouge_l_corpus(c), want / c.size(), 1e-9);
  }
}

TEST(Meteor, IdentityAndZero) {
  EXPECT_DOUBLE_EQ(meteor_simplified("Who directed Dial M for Murder?", "who directed dial m for murder ?").score,
                   1.0);
  EXPECT_EQ(meteor_simplified("a b c", "d e f").score, 0.0);
}

TEST(Meteor, AlignerMatchesEnumeration) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    auto h = text::tokenize(oracle::random_sentence(rng, 1, 7, 12));
    auto r = text::tokenize(oracle::random_sentence(rng, 1, 7, 12));
    auto a = meteor_align(h, r);
    auto b = oracle::meteor_enumerate(h, r);
    ASSERT_EQ(a.exact, b.exact);
    ASSERT_EQ(a.matches, b.matches);
    ASSERT_EQ(a.chunks, b.chunks);
  }
}

// Goldens from full alignment enumeration (see AlignerMatchesEnumeration),
// stored as exact fractions of matches/chunks.
struct MeteorGolden {
  const char* hyp;
  const char* ref;
  int exact, matches, chunks;
  double score;
};

TEST(Meteor, FiveCaseGoldens) {
  const MeteorGolden cases[] = {
      {"who starred top gun", "who starred top gun", 4, 4, 1, 1.0},
      {"who starring top gun", "who starred top gun", 3, 4, 1, 1.0},
      {"top gun starred who", "who starred top gun", 4, 4, 3, 0.7890625},
      {"the film directed by", "who directed the film", 3, 3, 2, 0.75 * (1 - 0.5 * 8.0 / 27.0)},
      {"dial m", "who directed dial m for murder", 2, 2, 1, (1.0 / 3.0) / (0.9 + 0.1 / 3.0)},
  };
  for (const auto& c : cases) {
    auto h = text::tokenize(c.hyp), r = text::tokenize(c.ref);
    auto enumerated = oracle::meteor_enumerate(h, r);
    EXPECT_EQ(enumerated.exact, c.exact) << c.hyp;
    EXPECT_EQ(enumerated.matches, c.matches) << c.hyp;
    EXPECT_EQ(enumerated.chunks, c.chunks) << c.hyp;
    double m = c.matches, P = m / h.size(), R = m / r.size();
    double fmean = P * R / (0.9 * P + 0.1 * R);
    double pen = c.chunks > 1 ? 0.5 * std::pow(c.chunks / m, 3) : 0.0;
    auto s = meteor_simplified(c.hyp, c.ref);
    EXPECT_NEAR(s.score, fmean * (1 - pen), 1e-12) << c.hyp;
    EXPECT_NEAR(s.score, c.score, 1e-12) << c.hyp;
  }
}

TEST(Cider, MatchesOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_corpus(rng, 2 + rng() % 9);
    EXPECT_NEAR(cider(c), oracle::cider(c), 1e-9);
  }
}

TEST(Cider, IdentityGivesUnitCosines) {
  Corpus c = {{"who starred top gun", {"who starred top gun"}},
              {"who directed dial m for murder", {"who directed dial m for murder"}},
              {"which place was tom cruise born in", {"which place was tom cruise born in"}}};
  auto d = cider_detail(c);
  for (const auto& item : d.cosines)
    for (double x : item) EXPECT_NEAR(x, 1.0, 1e-12);
  EXPECT_NEAR(d.score, 10.0, 1e-9);
  EXPECT_EQ(cider({{"a b", {"c d"}}, {"e f", {"g h"}}}), 0.0);
  EXPECT_THROW((void)cider({{"a", {"a"}}}), Error);
}

TEST(Squad, NormalizationAndScores) {
  EXPECT_EQ(exact_match("The Alfred Hitchcock.", "alfred hitchcock"), 1);
  EXPECT_NEAR(token_f1("Tom Cruise", "Cruise"), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(exact_match("", ""), 1);
  EXPECT_EQ(token_f1("", ""), 1.0);
  EXPECT_EQ(token_f1("", "x"), 0.0);
}

TEST(Squad, F1DominatesEm) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    auto a = oracle::random_sentence(rng, 0, 4, 8), b = oracle::random_sentence(rng, 0, 4, 8);
    EXPECT_GE(token_f1(a, b), exact_match(a, b));
  }
}

TEST(Metrics, SelfScoreIsOne) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    auto s = oracle::random_sentence(rng, 4, 15, 24);
    Corpus c = {{s, {s}}};
    EXPECT_NEAR(bleu(c, 4), 1.0, 1e-12);
    EXPECT_NEAR(rouge_l(s, s), 1.0, 1e-12);
    EXPECT_NEAR(meteor_simplified(s, s).score, 1.0, 1e-12);
  }
}
