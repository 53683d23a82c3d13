// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "pnr/error.hpp"
#include "pnr/prompt.hpp"
#include "pnr/text.hpp"

namespace pnr {
namespace {

const std::string kMovie = "I love The Sound of Music; it is the best movie ever!!";

TransferRequest request(TemplateKind kind, const DelimiterPair &d, std::string x = kMovie,
                        std::string s1 = "positive", std::string s2 = "negative") {
  return {std::move(x), StyleLabel(s1), StyleLabel(s2), PromptTemplate::builtin(kind), d, {}};
}

TEST(Delimiters, TenBuiltinsTwoIndistinguishable) {
  const auto &all = builtin_delimiters();
  ASSERT_EQ(all.size(), 10u);
  int same = 0;
  for (const auto &d : all) same += d.pair.kind() == DelimiterKind::kIndistinguishable;
  EXPECT_EQ(same, 2);
  EXPECT_EQ(*find_delimiter("curly"), DelimiterPair("{", "}"));
  EXPECT_EQ(find_delimiter("curly")->kind(), DelimiterKind::kComplementary);
  EXPECT_EQ(*find_delimiter("quote"), DelimiterPair("\"", "\""));
  EXPECT_EQ(find_delimiter("dash")->kind(), DelimiterKind::kIndistinguishable);
  EXPECT_EQ(*find_delimiter("blockquote"), DelimiterPair("> \"", "\""));
  EXPECT_EQ(*find_delimiter("bullet"), DelimiterPair("* \"", "\""));
  EXPECT_EQ(*find_delimiter("triple-angle"), DelimiterPair("<<<", ">>>"));
  EXPECT_FALSE(find_delimiter("nope"));
}

TEST(Delimiters, RejectEmptyMarkers) {
  EXPECT_THROW(DelimiterPair("", "}"), PreconditionError);
  EXPECT_THROW(DelimiterPair("{", ""), PreconditionError);
}

TEST(StyleLabel, RendersNegation) {
  EXPECT_EQ(StyleLabel("positive").render(), "positive");
  EXPECT_EQ(StyleLabel("positive", true).render(), "not positive");
  EXPECT_THROW(StyleLabel("  "), PreconditionError);
}

TEST(RenderPrompt, WorkedContrastiveExample) {
  EXPECT_EQ(render_prompt(request(TemplateKind::kContrastive, *find_delimiter("curly"))),
            "Here is a text, which is positive: {I love The Sound of Music; it is the best movie "
            "ever!!} Here is a rewrite of the text, which is negative: {");
}

TEST(RenderPrompt, VanillaOmitsSourceStyle) {
  const auto p = render_prompt(request(TemplateKind::kVanilla, *find_delimiter("curly")));
  EXPECT_EQ(p, "Here is a text: {" + kMovie + "} Here is a rewrite of the text, which is negative: {");
  EXPECT_EQ(p.find("positive"), std::string::npos);
}

TEST(RenderPrompt, NegationV1NeverNamesTarget) {
  const auto p = render_prompt(request(TemplateKind::kNegationV1, *find_delimiter("square")));
  EXPECT_NE(p.find("which is not positive"), std::string::npos);
  EXPECT_EQ(p.find("negative"), std::string::npos);
}

TEST(RenderPrompt, NegationV2NegatesTarget) {
  const auto p = render_prompt(request(TemplateKind::kNegationV2, *find_delimiter("curly")));
  EXPECT_EQ(p, "Here is a text, which is not negative: {" + kMovie +
                   "} Here is a rewrite of the text, which is negative: {");
}

TEST(RenderPrompt, EveryCombinationEndsWithOpenAndHoldsInputOnce) {
  for (auto kind : kAllTemplateKinds) {
    for (const auto &d : builtin_delimiters()) {
      const auto p = render_prompt(request(kind, d.pair, "some plain input"));
      EXPECT_TRUE(p.ends_with(d.pair.open())) << template_name(kind) << " " << d.name;
      EXPECT_EQ(count_occurrences(p, "some plain input"), 1u);
      if (kind == TemplateKind::kNegationV1 || kind == TemplateKind::kNegationV2) {
        EXPECT_NE(p.find("not "), std::string::npos);
      }
    }
  }
}

TEST(RenderPrompt, ExemplarsPrecedeQuery) {
  auto req = request(TemplateKind::kContrastive, *find_delimiter("curly"), "the soup was great");
  const auto zero_shot = render_prompt(req);
  req.exemplars.push_back({"i love it", "i hate it", StyleLabel("positive"), StyleLabel("negative")});
  req.exemplars.push_back({"so good", "so bad", StyleLabel("positive"), StyleLabel("negative")});
  EXPECT_EQ(render_prompt(req),
            "Here is a text, which is positive: {i love it} Here is a rewrite of the text, which is "
            "negative: {i hate it}\n"
            "Here is a text, which is positive: {so good} Here is a rewrite of the text, which is "
            "negative: {so bad}\n" +
                zero_shot);
}

TEST(RenderPrompt, ZeroExemplarsMatchesZeroShot) {
  auto req = request(TemplateKind::kVanilla, *find_delimiter("angle"));
  const auto a = render_prompt(req);
  req.exemplars.clear();
  EXPECT_EQ(render_prompt(req), a);
}

TEST(Validate, DelimiterCollisionInInput) {
  auto req = request(TemplateKind::kContrastive, *find_delimiter("curly"), "oops } here");
  EXPECT_THROW(validate(req), DelimiterCollision);
  EXPECT_THROW(render_prompt(req), DelimiterCollision);
}

TEST(Validate, ExemplarChecks) {
  auto req = request(TemplateKind::kContrastive, *find_delimiter("curly"), "fine");
  req.exemplars.push_back({"a", "b", StyleLabel("negative"), StyleLabel("positive")});
  EXPECT_THROW(validate(req), PreconditionError);
  req.exemplars = {{"a", "b}", StyleLabel("positive"), StyleLabel("negative")}};
  EXPECT_THROW(validate(req), DelimiterCollision);
  req.exemplars = {{"a", " ", StyleLabel("positive"), StyleLabel("negative")}};
  EXPECT_THROW(validate(req), PreconditionError);
  req.exemplars.clear();
  req.input_text = "   ";
  EXPECT_THROW(validate(req), PreconditionError);
}

TEST(Extract, WorkedExample) {
  const auto e = extract_completion("I hate The Sound of Music; it is the worst movie ever!!}",
                                    *find_delimiter("curly"));
  EXPECT_EQ(e.text, "I hate The Sound of Music; it is the worst movie ever!!");
  EXPECT_FALSE(e.unterminated);
}

TEST(Extract, UnterminatedAndFirstOccurrence) {
  const auto curly = *find_delimiter("curly");
  const auto u = extract_completion("abc", curly);
  EXPECT_EQ(u.text, "abc");
  EXPECT_TRUE(u.unterminated);
  EXPECT_EQ(extract_completion("x} junk} more", curly).text, "x");
  EXPECT_EQ(extract_completion("  spaced \"tail\" more", *find_delimiter("quote")).text, "spaced");
}

TEST(Extract, RoundTripRandomized) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcdefgh ijk LMN!?.,;'";
  for (int trial = 0; trial < 200; ++trial) {
    std::string y;
    const int len = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < len; ++i) y += alphabet[rng() % alphabet.size()];
    for (const auto &d : builtin_delimiters()) {
      const auto e = extract_completion(y + d.pair.close() + " trailing", d.pair);
      EXPECT_EQ(e.text, trim(y));
      EXPECT_FALSE(e.unterminated);
    }
  }
}

TEST(Cloze, Rendering) {
  EXPECT_EQ(render_cloze("great food", "<mask>"), "The following text is <mask>: [great food].");
  EXPECT_EQ(render_cloze("x", "[MASK]"), "The following text is [MASK]: [x].");
  EXPECT_THROW(render_cloze("", "<mask>"), PreconditionError);
}

TEST(Template, PatternValidation) {
  EXPECT_THROW(PromptTemplate("t", "no slot {d1}"), PreconditionError);
  EXPECT_THROW(PromptTemplate("t", "{x} {x} {d1}"), PreconditionError);
  EXPECT_THROW(PromptTemplate("t", "{d1}{x}{d2} ends badly"), PreconditionError);
  const PromptTemplate t("t", "Rewrite {x} as {s2}: {d1}");
  EXPECT_EQ(t.fill("a", "b", "{s1}", *find_delimiter("curly")), "Rewrite {s1} as b: {");
}

TEST(Template, NamesRoundTrip) {
  for (auto kind : kAllTemplateKinds) EXPECT_EQ(parse_template_kind(template_name(kind)), kind);
  EXPECT_FALSE(parse_template_kind("fancy"));
}

TEST(Catalog, LoadsAndOverrides) {
  const auto cat = PromptCatalog::from_json_text(R"({
    "templates": {"terse": "{x} -> {s2}: {d1}", "vanilla": "Text {d1}{x}{d2} as {s2}: {d1}"},
    "delimiters": {"pipes": {"open": "|", "close": "|"}}
  })");
  EXPECT_EQ(cat.templates().size(), 5u);
  EXPECT_EQ(cat.delimiters().size(), 11u);
  EXPECT_EQ(cat.find_template("vanilla")->pattern(), "Text {d1}{x}{d2} as {s2}: {d1}");
  EXPECT_EQ(cat.find_delimiter("pipes")->kind(), DelimiterKind::kIndistinguishable);
  EXPECT_THROW(PromptCatalog::from_json_text("[1,2]"), DataError);
  EXPECT_THROW(PromptCatalog::from_json_text("{not json"), DataError);
  EXPECT_THROW(PromptCatalog::from_json_text(R"({"templates":{"bad":"no slot"}})"), DataError);
}

}  // namespace
}  // namespace pnr
