// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pnr/error.hpp"
#include "pnr/text.hpp"

namespace pnr {

using nlohmann::json;

namespace {

const std::string kTsvHeader[] = {"id", "source", "reference", "source_style", "target_style"};

bool joins_left(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':': case '\'': case ')':
      return true;
    default:
      return false;
  }
}

bool is_contraction(std::string_view token) {
  const std::string lower = ascii_lower(token);
  for (const auto &suffix : contraction_suffixes()) {
    if (!std::string_view(lower).starts_with(suffix)) continue;
    if (lower.size() == suffix.size() ||
        !std::isalpha(static_cast<unsigned char>(lower[suffix.size()])))
      return true;
  }
  return false;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string required_string(const json &j, const char *key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw DataError(std::string("field '") + key + "' must be a string", line);
  return it->get<std::string>();
}

StylePairRecord make_record(std::string id, std::string source, std::optional<std::string> reference,
                            const std::string &s1, const std::string &s2, std::size_t line) {
  if (is_blank(source)) throw DataError("source must be non-empty", line);
  if (is_blank(s1) || is_blank(s2)) throw DataError("style labels must be non-empty", line);
  return StylePairRecord{std::move(id), std::move(source), std::move(reference),
                         StyleLabel(std::string(trim(s1))), StyleLabel(std::string(trim(s2)))};
}

// Unbiased draw in [0, bound) from the raw mt19937_64 stream, so sequences
// are identical across standard libraries.
std::uint64_t draw_below(std::mt19937_64 &rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

std::vector<std::string> pooled_words(const SymbSpec &spec) {
  std::vector<std::string> pool;
  for (const auto &[category, words] : spec.categories) pool.insert(pool.end(), words.begin(), words.end());
  return pool;
}

std::string pad_id(std::size_t i, std::size_t n) {
  const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
  std::string digits = std::to_string(i);
  return "symb-" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

struct WordSpan {
  std::string_view text;
  std::size_t offset;
};

std::vector<WordSpan> spans_of(std::string_view s) {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back({s.substr(i, j - i), i});
    i = j;
  }
  return out;
}

void check_operand(const WordSpan &w) {
  if (w.text.find_first_of("<>") != std::string_view::npos)
    throw ParseError("operand must be a plain word", w.offset);
}

}  // namespace

json to_json(const StylePairRecord &r) {
  return {{"id", r.id},
          {"source", r.source},
          {"reference", r.reference ? json(*r.reference) : json(nullptr)},
          {"source_style", r.source_style.render()},
          {"target_style", r.target_style.render()}};
}

StylePairRecord record_from_json(const json &j, std::size_t line) {
  if (!j.is_object()) throw DataError("row must be a JSON object", line);
  std::string id;
  if (auto it = j.find("id"); it != j.end() && !it->is_null()) {
    if (it->is_string())
      id = it->get<std::string>();
    else if (it->is_number_integer())
      id = std::to_string(it->get<std::int64_t>());
    else
      throw DataError("field 'id' must be a string or integer", line);
  } else {
    id = "line-" + std::to_string(line);
  }
  std::optional<std::string> reference;
  if (auto it = j.find("reference"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("field 'reference' must be a string or null", line);
    reference = it->get<std::string>();
  }
  return make_record(std::move(id), required_string(j, "source", line), std::move(reference),
                     required_string(j, "source_style", line), required_string(j, "target_style", line),
                     line);
}

const std::vector<std::string> &contraction_suffixes() {
  static const std::vector<std::string> kSuffixes{"n't", "'s", "'re", "'ve", "'m", "'ll", "'d"};
  return kSuffixes;
}

std::string clean_text(std::string_view raw) {
  const auto tokens = split_whitespace(raw);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      const char prev = tokens[i - 1].back();
      const bool glue = joins_left(tokens[i].front()) || prev == '(' || prev == '\'' ||
                        is_contraction(tokens[i]);
      if (!glue) out += ' ';
    }
    out += tokens[i];
  }
  return out;
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view s) noexcept {
  if (s == "jsonl") return DatasetFormat::kJsonl;
  if (s == "tsv") return DatasetFormat::kTsv;
  return std::nullopt;
}

DatasetFormat format_for_path(const std::filesystem::path &path) noexcept {
  return path.extension() == ".tsv" ? DatasetFormat::kTsv : DatasetFormat::kJsonl;
}

LoadResult parse_dataset(std::string_view content, DatasetFormat format, const LoadOptions &options) {
  LoadResult result;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  bool first_row = true;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto nl = content.find('\n', start);
    std::string_view line = content.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_blank(line)) continue;
    if (format == DatasetFormat::kTsv && first_row) {
      first_row = false;
      const auto fields = split_tabs(line);
      if (fields.size() == 5 && std::equal(fields.begin(), fields.end(), std::begin(kTsvHeader)))
        continue;
    }
    try {
      StylePairRecord rec = [&] {
        if (format == DatasetFormat::kJsonl) {
          json j;
          try {
            j = json::parse(line);
          } catch (const json::parse_error &e) {
            throw DataError(std::string("malformed JSON: ") + e.what(), line_no);
          }
          return record_from_json(j, line_no);
        }
        auto fields = split_tabs(line);
        if (fields.size() == 4) fields.insert(fields.begin() + 2, std::string());
        if (fields.size() != 5)
          throw DataError("expected 5 tab-separated columns, got " + std::to_string(fields.size()), line_no);
        std::optional<std::string> reference;
        if (!fields[2].empty()) reference = fields[2];
        return make_record(fields[0], fields[1], std::move(reference), fields[3], fields[4], line_no);
      }();
      if (rec.id.empty()) throw DataError("id must be non-empty", line_no);
      if (ids.count(rec.id)) throw DataError("duplicate id '" + rec.id + "'", line_no);
      if (options.clean) {
        rec.source = clean_text(rec.source);
        if (rec.reference) rec.reference = clean_text(*rec.reference);
      }
      const std::size_t words = split_whitespace(rec.source).size();
      if ((options.min_words && words < *options.min_words) ||
          (options.max_words && words > *options.max_words))
        continue;
      ids.insert(rec.id);
      ++result.direction_counts[rec.source_style.render() + "->" + rec.target_style.render()];
      result.records.push_back(std::move(rec));
    } catch (const DataError &e) {
      if (options.strict) throw;
      result.warnings.push_back({e.line(), e.what()});
    }
  }
  return result;
}

LoadResult load_dataset(const std::filesystem::path &path, DatasetFormat format, const LoadOptions &options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), format, options);
}

void write_dataset(std::ostream &out, const std::vector<StylePairRecord> &records, DatasetFormat format) {
  for (const auto &r : records) {
    if (format == DatasetFormat::kJsonl) {
      out << to_json(r).dump() << '\n';
    } else {
      out << r.id << '\t' << r.source << '\t' << r.reference.value_or("") << '\t'
          << r.source_style.render() << '\t' << r.target_style.render() << '\n';
    }
  }
}

std::vector<std::pair<std::string, std::vector<std::string>>> default_symb_categories() {
  return {
      {"animals",
       {"cat", "dog", "horse", "cow", "sheep", "goat", "lion", "tiger", "bear", "wolf", "fox",
        "rabbit", "mouse", "elephant", "giraffe", "zebra", "monkey", "deer", "eagle", "shark"}},
      {"colors",
       {"red", "blue", "green", "yellow", "purple", "pink", "brown", "black", "white", "gray",
        "violet", "cyan"}},
      {"fruits",
       {"apple", "banana", "cherry", "grape", "lemon", "mango", "peach", "pear", "plum", "kiwi",
        "melon", "orange", "papaya", "apricot", "lime"}},
      {"numbers",
       {"zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
        "nineteen", "twenty"}},
  };
}

void validate(const SymbSpec &spec) {
  if (spec.n < 1) throw PreconditionError("SYMB size must be >= 1");
  std::set<std::string> seen;
  for (const auto &[category, words] : spec.categories) {
    for (const auto &w : words) {
      if (w.empty() || split_whitespace(w).size() != 1 || w.size() != trim(w).size())
        throw PreconditionError("SYMB word '" + w + "' in " + category + " is not a single token");
      if (w.find_first_of("<>") != std::string::npos)
        throw PreconditionError("SYMB word '" + w + "' contains a comparison sign");
      if (!seen.insert(w).second)
        throw PreconditionError("SYMB word '" + w + "' appears in more than one list");
    }
  }
  if (seen.size() < 2) throw PreconditionError("SYMB needs at least two words");
}

std::uint64_t symb_capacity(const SymbSpec &spec) {
  const std::uint64_t p = pooled_words(spec).size();
  return p < 2 ? 0 : p * (p - 1) * 2;
}

std::vector<StylePairRecord> generate_symb(const SymbSpec &spec) {
  validate(spec);
  const auto pool = pooled_words(spec);
  const std::uint64_t p = pool.size();
  const std::uint64_t capacity = symb_capacity(spec);
  if (spec.n > capacity)
    throw PreconditionError("SYMB size " + std::to_string(spec.n) + " exceeds the " +
                            std::to_string(capacity) + " distinct records the word lists allow");

  // Partial Fisher-Yates over the implicit index space [0, capacity).
  std::mt19937_64 rng(spec.seed);
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<StylePairRecord> out;
  out.reserve(spec.n);
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    const std::uint64_t j = i + draw_below(rng, capacity - i);
    const std::uint64_t picked = at(j);
    swapped[j] = at(i);
    swapped[i] = picked;

    const bool greater = picked % 2 == 0;
    const std::uint64_t rest = picked / 2;
    const std::uint64_t a = rest / (p - 1);
    std::uint64_t b = rest % (p - 1);
    if (b >= a) ++b;
    std::string source = pool[a] + (greater ? " > " : " < ") + pool[b];
    std::string reference = verbalize_comparison(source);
    out.push_back(StylePairRecord{pad_id(i, spec.n), std::move(source), std::move(reference),
                                  StyleLabel("symbolic"), StyleLabel("English")});
  }
  return out;
}

std::string verbalize_comparison(std::string_view symbolic) {
  const auto w = spans_of(symbolic);
  if (w.size() < 2) throw ParseError("expected 'word > word' or 'word < word'", symbolic.size());
  check_operand(w[0]);
  if (w[1].text != ">" && w[1].text != "<") throw ParseError("expected '>' or '<'", w[1].offset);
  if (w.size() < 3) throw ParseError("missing right operand", symbolic.size());
  if (w.size() > 3) throw ParseError("unexpected trailing input", w[3].offset);
  check_operand(w[2]);
  return std::string(w[0].text) + (w[1].text == ">" ? " is greater than " : " is less than ") +
         std::string(w[2].text);
}

std::string parse_comparison(std::string_view english) {
  const auto w = spans_of(english);
  auto expect = [&](std::size_t i, auto pred, const char *what) {
    if (i >= w.size()) throw ParseError(std::string("expected ") + what, english.size());
    if (!pred(w[i].text)) throw ParseError(std::string("expected ") + what, w[i].offset);
  };
  auto any = [](std::string_view) { return true; };
  expect(0, any, "a word");
  check_operand(w[0]);
  expect(1, [](std::string_view t) { return t == "is"; }, "'is'");
  expect(2, [](std::string_view t) { return t == "greater" || t == "less"; }, "'greater' or 'less'");
  expect(3, [](std::string_view t) { return t == "than"; }, "'than'");
  expect(4, any, "a word");
  check_operand(w[4]);
  if (w.size() > 5) throw ParseError("unexpected trailing input", w[5].offset);
  return std::string(w[0].text) + (w[2].text == "greater" ? " > " : " < ") + std::string(w[4].text);
}

}  // namespace pnr
