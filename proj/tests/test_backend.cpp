// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "pnr/backend.hpp"
#include "pnr/error.hpp"
#include "pnr/mock_backends.hpp"
#include "pnr/prompt.hpp"
#include "pnr/wire.hpp"

namespace pnr {
namespace {

CompletionRequest sentiment_request(std::string input, int k = 3) {
  TransferRequest t{std::move(input), StyleLabel("positive"), StyleLabel("negative"),
                    PromptTemplate::builtin(TemplateKind::kContrastive), *find_delimiter("curly"), {}};
  CompletionRequest req;
  req.prompt = render_prompt(t);
  req.num_candidates = k;
  return req;
}

TEST(EchoMock, CannedCandidates) {
  mock::EchoGenerator echo("same}");
  const auto resp = complete(echo, sentiment_request("good food"));
  ASSERT_EQ(resp.candidates.size(), 3u);
  for (const auto &c : resp.candidates) EXPECT_EQ(c.text, "same}");
}

TEST(EchoMock, CopyingModeReturnsInput) {
  auto echo = mock::EchoGenerator::copying();
  const auto resp = complete(echo, sentiment_request("hello there", 2));
  ASSERT_EQ(resp.candidates.size(), 2u);
  EXPECT_EQ(extract_completion(resp.candidates[0].text, *find_delimiter("curly")).text, "hello there");
}

TEST(LexiconMock, FlipsAtTopByDefault) {
  mock::LexiconFlipGenerator gen;
  const auto resp = complete(gen, sentiment_request("good food"));
  ASSERT_EQ(resp.candidates.size(), 3u);
  EXPECT_EQ(resp.candidates[0].text, "bad food}");
  EXPECT_EQ(resp.candidates[1].text, "good food}");
  for (std::size_t i = 1; i < resp.candidates.size(); ++i)
    EXPECT_GE(resp.candidates[i - 1].gen_score, resp.candidates[i].gen_score);
}

TEST(LexiconMock, SeedPicksFlipRank) {
  mock::LexiconFlipGenerator gen;
  for (std::int64_t seed = 0; seed < 6; ++seed) {
    auto req = sentiment_request("I love this great place");
    req.seed = seed;
    const auto resp = complete(gen, req);
    const auto rank = static_cast<std::size_t>(seed % 3);
    EXPECT_EQ(resp.candidates[rank].text, "I hate this terrible place}");
    EXPECT_EQ(gen.flip_rank(req), static_cast<int>(rank));
  }
}

TEST(LexiconMock, FlipPreservesCaseAndPunctuation) {
  EXPECT_EQ(mock::flip_sentiment("Good, really good!"), "Bad, really bad!");
  EXPECT_EQ(mock::flip_sentiment("The worst."), "The best.");
  EXPECT_EQ(mock::flip_sentiment("no lexicon words"), "no lexicon words");
}

TEST(LexiconMock, ScoresOwnOutput) {
  mock::LexiconFlipGenerator gen;
  const auto resp = score_tokens(gen, "bad food");
  ASSERT_EQ(resp.tokens.size(), 2u);
  for (const auto &t : resp.tokens) {
    EXPECT_TRUE(std::isfinite(t.logprob));
    EXPECT_LE(t.logprob, 0.0);
  }
  EXPECT_NEAR(resp.tokens[0].logprob, -std::log(1000.0), 1e-12);
  EXPECT_NEAR(resp.tokens[1].logprob, -std::log(50257.0), 1e-12);
}

TEST(LexiconMock, RejectsPromptWithoutQuery) {
  mock::LexiconFlipGenerator gen;
  CompletionRequest req;
  req.prompt = "no delimiter here";
  EXPECT_THROW(complete(gen, req), BackendError);
}

TEST(ParseQuery, FindsLongestMatchingOpen) {
  const auto q = mock::parse_query("Here is a text: {{a b}} Here is a rewrite: {{");
  ASSERT_TRUE(q);
  EXPECT_EQ(q->first, "a b");
  EXPECT_EQ(q->second.open(), "{{");
}

TEST(UniformMock, EachTokenCostsLogV) {
  mock::UniformScorer u;
  const auto resp = score_tokens(u, "one two three four");
  ASSERT_EQ(resp.tokens.size(), 4u);
  for (const auto &t : resp.tokens) EXPECT_DOUBLE_EQ(t.logprob, -std::log(50257.0));
  EXPECT_THROW(score_tokens(u, ""), PreconditionError);
  EXPECT_EQ(u.calls(), 1);
}

TEST(SentimentMock, LexiconRule) {
  mock::SentimentMaskFiller mlm;
  const auto resp = fill_mask(mlm, render_cloze("great food", "<mask>"), {"positive", "negative"});
  EXPECT_DOUBLE_EQ(resp.scores.at("positive"), 0.9);
  EXPECT_DOUBLE_EQ(resp.scores.at("negative"), 0.1);
  const auto tie = fill_mask(mlm, render_cloze("a table", "<mask>"), {"positive", "negative"});
  EXPECT_DOUBLE_EQ(tie.scores.at("positive"), 0.5);
  EXPECT_DOUBLE_EQ(tie.scores.at("negative"), 0.5);
}

TEST(SentimentMock, ReportsUnknownLabels) {
  mock::SentimentMaskFiller mlm;
  const auto resp = fill_mask(mlm, render_cloze("great food", "<mask>"), {"positive", "formal"});
  EXPECT_EQ(resp.label_errors.count("formal"), 1u);
  EXPECT_EQ(resp.scores.count("positive"), 1u);
}

TEST(FillMask, Preconditions) {
  mock::SentimentMaskFiller mlm;
  EXPECT_THROW(fill_mask(mlm, render_cloze("x", "<mask>"), {"a"}), PreconditionError);
  EXPECT_THROW(fill_mask(mlm, render_cloze("x", "<mask>"), {"a", "a"}), PreconditionError);
  EXPECT_THROW(fill_mask(mlm, "<mask> and <mask>", {"positive", "negative"}), PreconditionError);
  EXPECT_THROW(fill_mask(mlm, "no mask", {"positive", "negative"}), PreconditionError);
}

// Answers with a label nobody asked for.
class StrayLabelFiller : public MaskFiller {
 public:
  std::string mask_token() const override { return "<mask>"; }
  MaskFillResponse do_fill_mask(std::string_view, const std::vector<std::string> &) override {
    return {{{"positive", 0.3}, {"neutral", 0.2}}, {}};
  }
};

TEST(FillMask, MismatchedResponseIsMalformed) {
  StrayLabelFiller mlm;
  try {
    fill_mask(mlm, "<mask>", {"positive", "negative"});
    FAIL() << "expected BackendError";
  } catch (const BackendError &e) {
    EXPECT_EQ(e.kind(), BackendErrorKind::kMalformed);
    EXPECT_FALSE(e.retryable());
  }
}

TEST(FillMask, MissingLabelIsReportedNotThrown) {
  mock::FixedMaskFiller mlm({{"positive", 0.3}});
  const auto resp = fill_mask(mlm, "<mask>", {"positive", "negative"});
  EXPECT_EQ(resp.label_errors.at("negative"), LabelIssue::kNotInVocab);
}

TEST(HashMock, DeterministicAndFixedDim) {
  mock::HashEmbedder e;
  const auto a = embed_tokens(e, "the same text");
  const auto b = embed_tokens(e, "the same text");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.dim, 32);
  EXPECT_EQ(a.vectors.size(), 3u);
  EXPECT_EQ(embed_tokens(e, "other").dim, a.dim);
  EXPECT_THROW(embed_tokens(e, "   "), PreconditionError);
}

TEST(Embed, RejectsZeroVectors) {
  mock::TableEmbedder e({{"z", {0.0, 0.0}}});
  EXPECT_THROW(embed_tokens(e, "z"), BackendError);
}

TEST(Complete, SortsAndValidates) {
  mock::CallbackGenerator gen([](const CompletionRequest &) {
    return CompletionResponse{{{"low}", -3.0}, {"high}", -1.0}, {"mid}", -2.0}}};
  });
  CompletionRequest req;
  req.prompt = "p";
  const auto resp = complete(gen, req);
  EXPECT_EQ(resp.candidates[0].text, "high}");
  EXPECT_EQ(resp.candidates[2].text, "low}");
  req.num_candidates = 0;
  EXPECT_THROW(complete(gen, req), PreconditionError);
  mock::CallbackGenerator empty([](const CompletionRequest &) { return CompletionResponse{}; });
  req.num_candidates = 1;
  EXPECT_THROW(complete(empty, req), BackendError);
}

TEST(Wire, CompletionRoundTrip) {
  CompletionRequest req;
  req.prompt = "Here: {";
  req.max_new_tokens = 12;
  req.num_candidates = 4;
  req.stop = "}";
  req.seed = 99;
  req.decode = {DecodeMode::kSample, 2, 0.7};
  const auto j = wire::encode(req);
  EXPECT_EQ(j["decode"]["mode"], "sample");
  EXPECT_EQ(wire::decode_completion_request(j), req);

  CompletionResponse resp{{{"a}", -0.5}, {"b}", -0.75}}};
  EXPECT_EQ(wire::decode_completion_response(wire::encode(resp)), resp);
}

TEST(Wire, DefaultBeamWidthIsK) {
  CompletionRequest req;
  req.prompt = "p";
  req.num_candidates = 5;
  EXPECT_EQ(wire::encode(req)["decode"]["beam_width"], 5);
}

TEST(Wire, OtherBodiesRoundTrip) {
  TokenScoreResponse s{{{"a", -1.5}, {"b", -0.25}}};
  EXPECT_EQ(wire::decode_score_response(wire::encode(s)), s);
  MaskFillResponse m{{{"positive", 0.75}}, {{"formal", LabelIssue::kNotSingleToken}}};
  const auto mj = wire::encode(m);
  EXPECT_EQ(mj["errors"]["formal"], "not_single_token");
  EXPECT_EQ(wire::decode_fill_response(mj), m);
  EmbeddingResponse e{2, {{1.0, 0.0}, {0.5, 0.5}}};
  EXPECT_EQ(wire::decode_embed_response(wire::encode(e)), e);
  const auto [text, labels] = wire::decode_fill_request(wire::encode_fill_request("t", {"x", "y"}));
  EXPECT_EQ(text, "t");
  EXPECT_EQ(labels, (std::vector<std::string>{"x", "y"}));
}

TEST(Wire, MalformedBodies) {
  auto expect_malformed = [](auto fn) {
    try {
      fn();
      ADD_FAILURE() << "expected malformed";
    } catch (const BackendError &e) {
      EXPECT_EQ(e.kind(), BackendErrorKind::kMalformed);
    }
  };
  expect_malformed([] { wire::decode_completion_response(nlohmann::json::parse(R"({"cands":[]})")); });
  expect_malformed([] { wire::decode_score_response(nlohmann::json::parse(R"({"tokens":[{"token":1}]})")); });
  expect_malformed([] { wire::decode_embed_response(nlohmann::json::parse(R"({"dim":"x"})")); });
  expect_malformed([] { wire::decode_fill_response(nlohmann::json::parse(R"([1])")); });
}

TEST(Endpoints, FromEnvironment) {
  ::setenv("PNR_COMPLETE_URL", "http://127.0.0.1:1234", 1);
  ::setenv("PNR_MASK_TOKEN", "[MASK]", 1);
  ::setenv("PNR_TIMEOUT_MS", "250", 1);
  const auto e = BackendEndpoints::from_env();
  EXPECT_EQ(e.complete_url, "http://127.0.0.1:1234");
  EXPECT_EQ(e.mask_token, "[MASK]");
  EXPECT_EQ(e.timeout.count(), 250);
  ::setenv("PNR_TIMEOUT_MS", "soon", 1);
  EXPECT_THROW(BackendEndpoints::from_env(), PreconditionError);
  ::unsetenv("PNR_COMPLETE_URL");
  ::unsetenv("PNR_MASK_TOKEN");
  ::unsetenv("PNR_TIMEOUT_MS");
}

}  // namespace
}  // namespace pnr
