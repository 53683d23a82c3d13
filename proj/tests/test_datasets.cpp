// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "pnr/datasets.hpp"
#include "pnr/error.hpp"

namespace pnr {
namespace {

std::string non_space(const std::string &s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

TEST(Clean, Examples) {
  EXPECT_EQ(clean_text("this place was great !"), "this place was great!");
  EXPECT_EQ(clean_text("i  love it ."), "i love it.");
  EXPECT_EQ(clean_text("do n't go"), "don't go");
  EXPECT_EQ(clean_text("it 's fine , really"), "it's fine, really");
  EXPECT_EQ(clean_text("( see here ) ok"), "(see here) ok");
  EXPECT_EQ(clean_text("  padded\t\ttext \n"), "padded text");
  EXPECT_EQ(clean_text(""), "");
}

TEST(Clean, IdempotentAndKeepsCharacters) {
  std::mt19937_64 rng(17);
  const char *pieces[] = {"word", " ", "  ", ".", ",", "!", "?", ";", ":", "'", "(", ")", "n't",
                          "'s", "do", "\t", "it", "x"};
  for (int i = 0; i < 300; ++i) {
    std::string s;
    const auto len = rng() % 20;
    for (std::size_t j = 0; j < len; ++j) s += pieces[rng() % std::size(pieces)];
    const auto once = clean_text(s);
    EXPECT_EQ(clean_text(once), once) << s;
    EXPECT_EQ(non_space(once), non_space(s));
  }
}

TEST(Load, JsonlFixture) {
  const std::string text =
      R"({"id":"a","source":"good food","reference":"bad food","source_style":"positive","target_style":"negative"})"
      "\n"
      R"({"id":"b","source":"bad day","source_style":"negative","target_style":"positive"})"
      "\n\n"
      R"({"id":"c","source":"nice","reference":null,"source_style":"positive","target_style":"negative"})"
      "\n";
  const auto res = parse_dataset(text, DatasetFormat::kJsonl);
  ASSERT_EQ(res.records.size(), 3u);
  EXPECT_EQ(*res.records[0].reference, "bad food");
  EXPECT_FALSE(res.records[1].reference);
  EXPECT_FALSE(res.records[2].reference);
  EXPECT_EQ(res.direction_counts.at("positive->negative"), 2u);
  EXPECT_EQ(res.direction_counts.at("negative->positive"), 1u);
}

TEST(Load, TsvWithHeaderAndMissingReference) {
  const std::string text =
      "id\tsource\treference\tsource_style\ttarget_style\n"
      "r1\tgood food\tbad food\tpositive\tnegative\n"
      "r2\tbad day\t\tnegative\tpositive\n"
      "r3\tfine\tpositive\tnegative\n";
  const auto res = parse_dataset(text, DatasetFormat::kTsv);
  ASSERT_EQ(res.records.size(), 3u);
  EXPECT_EQ(*res.records[0].reference, "bad food");
  EXPECT_FALSE(res.records[1].reference);
  EXPECT_FALSE(res.records[2].reference);
  EXPECT_EQ(res.records[2].target_style.name(), "negative");
}

TEST(Load, MalformedRowsSkippedOrFatal) {
  const std::string text =
      R"({"id":"a","source":"ok","source_style":"p","target_style":"n"})"
      "\n{broken\n"
      R"({"id":"c","source":"","source_style":"p","target_style":"n"})"
      "\n";
  const auto lenient = parse_dataset(text, DatasetFormat::kJsonl);
  EXPECT_EQ(lenient.records.size(), 1u);
  ASSERT_EQ(lenient.warnings.size(), 2u);
  EXPECT_EQ(lenient.warnings[0].line, 2u);
  LoadOptions strict;
  strict.strict = true;
  try {
    parse_dataset(text, DatasetFormat::kJsonl, strict);
    FAIL();
  } catch (const DataError &e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(Load, DuplicateIdsAndLengthFilter) {
  const std::string text =
      R"({"id":"a","source":"one two three","source_style":"p","target_style":"n"})"
      "\n"
      R"({"id":"a","source":"four","source_style":"p","target_style":"n"})"
      "\n";
  const auto res = parse_dataset(text, DatasetFormat::kJsonl);
  EXPECT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.warnings.size(), 1u);
  LoadOptions filt;
  filt.min_words = 2;
  EXPECT_EQ(parse_dataset(R"({"id":"x","source":"lonely","source_style":"p","target_style":"n"})",
                          DatasetFormat::kJsonl, filt)
                .records.size(),
            0u);
}

TEST(Load, CleaningOption) {
  LoadOptions opts;
  opts.clean = true;
  const auto res = parse_dataset("x1\tgreat food !\tbad food .\tpositive\tnegative\n", DatasetFormat::kTsv, opts);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].source, "great food!");
  EXPECT_EQ(*res.records[0].reference, "bad food.");
}

TEST(Load, FilesAndFormats) {
  const auto dir = std::filesystem::temp_directory_path() / "pnr_datasets_test";
  std::filesystem::create_directories(dir);
  const std::vector<StylePairRecord> recs{
      {"a", "good", std::string("bad"), StyleLabel("positive"), StyleLabel("negative")},
      {"b", "sad", std::nullopt, StyleLabel("negative"), StyleLabel("positive")}};
  for (auto fmt : {DatasetFormat::kJsonl, DatasetFormat::kTsv}) {
    const auto path = dir / (fmt == DatasetFormat::kJsonl ? "d.jsonl" : "d.tsv");
    {
      std::ofstream out(path);
      write_dataset(out, recs, fmt);
    }
    EXPECT_EQ(format_for_path(path), fmt);
    EXPECT_EQ(load_dataset(path, fmt).records, recs);
  }
  EXPECT_THROW(load_dataset(dir / "missing.jsonl", DatasetFormat::kJsonl), DataError);
  std::filesystem::remove_all(dir);
}

TEST(Symb, WorkedRules) {
  EXPECT_EQ(verbalize_comparison("apple > banana"), "apple is greater than banana");
  EXPECT_EQ(verbalize_comparison("three < seven"), "three is less than seven");
  EXPECT_EQ(parse_comparison("red is greater than blue"), "red > blue");
  EXPECT_THROW(verbalize_comparison("red >= blue"), ParseError);
  EXPECT_THROW(parse_comparison("red is bigger than blue"), ParseError);
  try {
    verbalize_comparison("red >= blue");
  } catch (const ParseError &e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Symb, DefaultListsAreValid) {
  const auto cats = default_symb_categories();
  ASSERT_EQ(cats.size(), 4u);
  std::set<std::string> seen;
  std::size_t total = 0;
  for (const auto &[name, words] : cats) {
    total += words.size();
    for (const auto &w : words) {
      EXPECT_EQ(w.find(' '), std::string::npos);
      seen.insert(w);
    }
  }
  EXPECT_EQ(seen.size(), total);
  EXPECT_EQ(total, 20u + 12u + 15u + 21u);
}

TEST(Symb, GeneratesDistinctDeterministicRecords) {
  SymbSpec spec{default_symb_categories(), 1000, 7};
  const auto a = generate_symb(spec);
  EXPECT_EQ(a, generate_symb(spec));
  ASSERT_EQ(a.size(), 1000u);
  std::set<std::string> sources;
  for (const auto &r : a) {
    sources.insert(r.source);
    EXPECT_EQ(parse_comparison(verbalize_comparison(r.source)), r.source);
    EXPECT_EQ(*r.reference, verbalize_comparison(r.source));
    std::string alpha, op, beta;
    std::istringstream(r.source) >> alpha >> op >> beta;
    EXPECT_NE(alpha, beta);
    EXPECT_EQ(r.source_style.name(), "symbolic");
    EXPECT_EQ(r.target_style.name(), "English");
  }
  EXPECT_EQ(sources.size(), 1000u);
  spec.seed = 8;
  EXPECT_NE(generate_symb(spec), a);
}

TEST(Symb, CapacityAndValidation) {
  SymbSpec tiny{{{"x", {"a", "b"}}}, 4, 1};
  EXPECT_EQ(symb_capacity(tiny), 4u);
  EXPECT_EQ(generate_symb(tiny).size(), 4u);
  tiny.n = 5;
  EXPECT_THROW(generate_symb(tiny), PreconditionError);
  SymbSpec overlap{{{"x", {"a", "b"}}, {"y", {"b", "c"}}}, 1, 1};
  EXPECT_THROW(validate(overlap), PreconditionError);
  SymbSpec spaced{{{"x", {"a b", "c"}}}, 1, 1};
  EXPECT_THROW(validate(spaced), PreconditionError);
}

}  // namespace
}  // namespace pnr
