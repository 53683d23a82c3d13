// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bleu_oracle.hpp"
#include "gleu_oracle.hpp"
#include "pnr/error.hpp"
#include "pnr/metrics.hpp"
#include "pnr/mock_backends.hpp"

namespace pnr {
namespace {

using Strings = std::vector<std::string>;

std::string random_sentence(std::mt19937_64 &rng, int vocab, int max_len) {
  std::string s;
  const int len = 1 + static_cast<int>(rng() % max_len);
  for (int i = 0; i < len; ++i) s += (i ? " w" : "w") + std::to_string(rng() % vocab);
  return s;
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize_eval("Hello, world!"), (Strings{"hello", ",", "world", "!"}));
  EXPECT_TRUE(tokenize_eval("").empty());
  EXPECT_EQ(tokenize_eval("A  B"), (Strings{"a", "b"}));
}

TEST(Tokenize, NumbersAndApostrophes) {
  EXPECT_EQ(tokenize_eval("It costs 3.50, or 1,000."),
            (Strings{"it", "costs", "3.50", ",", "or", "1,000", "."}));
  EXPECT_EQ(tokenize_eval("don't (really)"), (Strings{"don't", "(", "really", ")"}));
  EXPECT_EQ(tokenize_eval("well-known 1990-2000"), (Strings{"well-known", "1990", "-", "2000"}));
}

TEST(Bleu, TheTheTheThe) {
  // Precisions 1/4, 1/4 (smoothed), 1/3 (smoothed), 1/2 (smoothed); no
  // brevity penalty.
  const Strings h{"the the the the"}, r{"the cat"};
  EXPECT_NEAR(oracle::corpus_bleu(h, r), 31.947155212314, 1e-9);
  const auto rep = corpus_bleu(h, r);
  EXPECT_NEAR(rep.score, 31.947155212314, 1e-9);
  EXPECT_NEAR(rep.score, 100.0 * std::pow(1.0 / 96.0, 0.25), 1e-9);
  EXPECT_DOUBLE_EQ(rep.precisions[0], 0.25);
  EXPECT_DOUBLE_EQ(rep.precisions[1], 0.25);
  EXPECT_DOUBLE_EQ(rep.brevity_penalty, 1.0);
  EXPECT_EQ(rep.hyp_len, 4);
  EXPECT_EQ(rep.ref_len, 2);
}

TEST(Bleu, FivePairToyCorpus) {
  const Strings h{"the cat sat on the mat", "a dog ran", "it is good", "we love this place",
                  "the food was cold"};
  const Strings r{"the cat is on the mat", "the dog ran away", "it is very good",
                  "we love the place", "food was cold"};
  EXPECT_NEAR(oracle::corpus_bleu(h, r), 32.849377267066, 1e-9);
  EXPECT_NEAR(corpus_bleu(h, r).score, 32.849377267066, 1e-9);
}

TEST(Bleu, IdentityAndDisjoint) {
  const Strings x{"Some text, here.", "and more"};
  const auto rep = corpus_bleu(x, x);
  EXPECT_DOUBLE_EQ(rep.score, 100.0);
  EXPECT_DOUBLE_EQ(rep.brevity_penalty, 1.0);
  EXPECT_DOUBLE_EQ(corpus_bleu(Strings{"a b c"}, Strings{"x y z"}).score, 0.0);
  EXPECT_DOUBLE_EQ(self_sbleu(x, x), 100.0);
  EXPECT_DOUBLE_EQ(ref_sbleu(x, x), 100.0);
}

TEST(Bleu, BrevityPenalty) {
  const auto rep = corpus_bleu(Strings{"a b"}, Strings{"a b c d"});
  EXPECT_NEAR(rep.brevity_penalty, std::exp(1.0 - 2.0), 1e-12);
}

TEST(Bleu, Errors) {
  EXPECT_THROW(corpus_bleu(Strings{"a"}, Strings{}), PreconditionError);
  EXPECT_THROW(corpus_bleu(Strings{}, Strings{}), PreconditionError);
}

TEST(Bleu, MatchesOracleOnRandomCorpora) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    Strings h, r;
    for (std::size_t i = 0; i < n; ++i) {
      h.push_back(random_sentence(rng, 8, 12));
      r.push_back(random_sentence(rng, 8, 12));
    }
    EXPECT_NEAR(corpus_bleu(h, r).score, oracle::corpus_bleu(h, r), 1e-6);
    EXPECT_DOUBLE_EQ(corpus_bleu(h, r).score, corpus_bleu_serial(h, r).score);
  }
}

TEST(Bleu, PermutationInvariant) {
  std::mt19937_64 rng(8);
  Strings h, r;
  for (int i = 0; i < 8; ++i) {
    h.push_back(random_sentence(rng, 6, 10));
    r.push_back(random_sentence(rng, 6, 10));
  }
  const double before = corpus_bleu(h, r).score;
  std::vector<std::size_t> order(h.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  Strings hp, rp;
  for (auto i : order) {
    hp.push_back(h[i]);
    rp.push_back(r[i]);
  }
  EXPECT_DOUBLE_EQ(corpus_bleu(hp, rp).score, before);
}

TEST(Gleu, PerfectCases) {
  EXPECT_DOUBLE_EQ(sentence_gleu("he went home", "he went home", "he went home"), 1.0);
  EXPECT_DOUBLE_EQ(sentence_gleu("he go home", "he went home", "he went home"), 1.0);
}

TEST(Gleu, ThreeTokenTripleWithSourceOnlyNgram) {
  // "c" survives from the source but is absent from the reference.
  EXPECT_DOUBLE_EQ(oracle::sentence_gleu("a b c", "a b c", "a b d"), 0.0);
  EXPECT_DOUBLE_EQ(sentence_gleu("a b c", "a b c", "a b d"), 0.0);
}

TEST(Gleu, PartialCorrection) {
  const std::string src = "yesterday i goes to the big market with my friend";
  const std::string hyp = "yesterday i went to the big market with my friend";
  const std::string ref = "yesterday i went to the big market with my friends";
  // Per-order precisions 8/10, 7/9, 6/8, 5/7.
  EXPECT_NEAR(oracle::sentence_gleu(src, hyp, ref), 0.759835685652, 1e-12);
  EXPECT_NEAR(sentence_gleu(src, hyp, ref), 0.759835685652, 1e-12);
  EXPECT_DOUBLE_EQ(sentence_gleu(src, src, ref), 0.0);
}

TEST(Gleu, MatchesOracleOnRandomTriples) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_sentence(rng, 4, 8), h = random_sentence(rng, 4, 8),
               r = random_sentence(rng, 4, 8);
    EXPECT_NEAR(sentence_gleu(s, h, r), oracle::sentence_gleu(s, h, r), 1e-9) << s << "|" << h << "|" << r;
  }
}

TEST(Gleu, RejectsEmpty) { EXPECT_THROW(sentence_gleu("", "a", "a"), PreconditionError); }

TEST(Perplexity, UniformIsVocabulary) {
  mock::UniformScorer u(50257);
  EXPECT_NEAR(corpus_perplexity(Strings{"a b c", "d", "e f g h i j k"}, u), 50257.0, 1e-9);
  mock::UniformScorer four(4);
  EXPECT_NEAR(corpus_perplexity(Strings{"x"}, four), 4.0, 1e-12);
  EXPECT_THROW(corpus_perplexity(Strings{}, u), PreconditionError);
}

TEST(ExactMatch, Examples) {
  EXPECT_DOUBLE_EQ(exact_match_accuracy(Strings{"a", "b"}, Strings{"a", "b"}), 1.0);
  EXPECT_DOUBLE_EQ(exact_match_accuracy(Strings{"a", "b", "c", "d"}, Strings{"a", "b", "c", "x"}), 0.75);
  EXPECT_DOUBLE_EQ(exact_match_accuracy(Strings{" a ", ""}, Strings{"a", "  "}), 1.0);
  EXPECT_THROW(exact_match_accuracy(Strings{"a"}, Strings{}), PreconditionError);
}

TEST(ExactMatch, Symmetric) {
  const Strings a{"x", "y", "z"}, b{"x", "q", "z"};
  EXPECT_DOUBLE_EQ(exact_match_accuracy(a, b), exact_match_accuracy(b, a));
}

TEST(ClassifierAccuracy, FlippedVersusCopies) {
  mock::SentimentMaskFiller clf;
  const Strings sources{"The food was good.", "I love it", "great service"};
  Strings flipped;
  for (const auto &s : sources) flipped.push_back(mock::flip_sentiment(s));
  const std::vector<StyleDirection> dirs(3, StyleDirection{"positive", "negative"});
  EXPECT_DOUBLE_EQ(classifier_accuracy(flipped, dirs, clf), 1.0);
  EXPECT_DOUBLE_EQ(classifier_accuracy(sources, dirs, clf), 0.0);
  EXPECT_THROW(classifier_accuracy(Strings{}, std::vector<StyleDirection>{}, clf), PreconditionError);
}

TEST(ClassifierAccuracy, TieIsNotAHit) {
  mock::SentimentMaskFiller clf;
  const std::vector<StyleDirection> dirs{{"positive", "negative"}};
  EXPECT_DOUBLE_EQ(classifier_accuracy(Strings{"a chair"}, dirs, clf), 0.0);
}

TEST(Evaluate, OptionalFields) {
  mock::SentimentMaskFiller clf;
  mock::UniformScorer u;
  const Strings out{"bad food"}, src{"good food"};
  const std::vector<StyleDirection> dirs{{"positive", "negative"}};
  const auto s = evaluate({out, src, {}, dirs, &clf, &u, 2});
  EXPECT_FALSE(s.r_sbleu);
  ASSERT_TRUE(s.s_sbleu);
  EXPECT_DOUBLE_EQ(*s.accuracy, 1.0);
  EXPECT_NEAR(*s.ppl, 50257.0, 1e-9);
  EXPECT_FALSE(s.exact_match);

  const auto t = evaluate({out, src, out, {}, nullptr, nullptr, 1});
  EXPECT_DOUBLE_EQ(*t.r_sbleu, 100.0);
  EXPECT_DOUBLE_EQ(*t.exact_match, 1.0);
  EXPECT_DOUBLE_EQ(*t.gleu, 1.0);
  EXPECT_FALSE(t.accuracy);
  EXPECT_FALSE(t.ppl);
}

TEST(Evaluate, SummaryJsonRoundTrip) {
  EvalSummary s;
  s.r_sbleu = 12.5;
  s.accuracy = 0.75;
  s.ppl = 31.25;
  const auto j = to_json(s);
  EXPECT_TRUE(j["s_sbleu"].is_null());
  EXPECT_EQ(eval_summary_from_json(j), s);
}

}  // namespace
}  // namespace pnr
