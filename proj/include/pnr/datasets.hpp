// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pnr/prompt.hpp"

namespace pnr {

struct StylePairRecord {
  std::string id;
  std::string source;
  std::optional<std::string> reference;
  StyleLabel source_style;
  StyleLabel target_style;

  friend bool operator==(const StylePairRecord &, const StylePairRecord &) = default;
};

nlohmann::json to_json(const StylePairRecord &r);
/// Throws DataError on schema violations; `line` only labels the message.
StylePairRecord record_from_json(const nlohmann::json &j, std::size_t line = 0);

/// Suffixes re-attached to the preceding word by clean_text.
const std::vector<std::string> &contraction_suffixes();

/// Collapses whitespace runs, drops the space before . , ! ? ; : ' ) and
/// after ( and ', re-attaches split contractions (do n't -> don't) and
/// trims the ends. Only whitespace is ever changed.
std::string clean_text(std::string_view raw);

enum class DatasetFormat { kJsonl, kTsv };

std::optional<DatasetFormat> parse_dataset_format(std::string_view s) noexcept;
/// By file extension: .tsv is TSV, anything else JSONL.
DatasetFormat format_for_path(const std::filesystem::path &path) noexcept;

struct LoadOptions {
  bool strict = false;
  bool clean = false;
  /// Keep only sources whose word count lies in [min_words, max_words].
  std::optional<std::size_t> min_words;
  std::optional<std::size_t> max_words;
};

struct LoadWarning {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  std::vector<StylePairRecord> records;
  std::vector<LoadWarning> warnings;
  /// Record count per "source->target" direction.
  std::map<std::string, std::size_t> direction_counts;
};

/// JSONL rows: {"id","source","reference","source_style","target_style"}.
/// TSV rows: id, source, reference, source_style, target_style; the header
/// row is optional, an empty reference field or a 4-column row means no
/// reference. Malformed rows are skipped with a warning, or throw
/// DataError naming the line in strict mode.
LoadResult parse_dataset(std::string_view content, DatasetFormat format,
                         const LoadOptions &options = {});
LoadResult load_dataset(const std::filesystem::path &path, DatasetFormat format,
                        const LoadOptions &options = {});

void write_dataset(std::ostream &out, const std::vector<StylePairRecord> &records,
                   DatasetFormat format);

struct SymbSpec {
  /// Ordered (category, words) lists; words are single tokens and the
  /// lists are disjoint.
  std::vector<std::pair<std::string, std::vector<std::string>>> categories;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
};

/// 20 animals, 12 colors, 15 fruits and the number words zero to twenty.
std::vector<std::pair<std::string, std::vector<std::string>>> default_symb_categories();

void validate(const SymbSpec &spec);

/// Number of distinct (alpha, operator, beta) records the generator can emit.
std::uint64_t symb_capacity(const SymbSpec &spec);

/// spec.n distinct records "a > b" / "a < b" with a != b drawn from the
/// pooled word lists, each paired with its English verbalization.
std::vector<StylePairRecord> generate_symb(const SymbSpec &spec);

/// "a > b" -> "a is greater than b", "a < b" -> "a is less than b".
std::string verbalize_comparison(std::string_view symbolic);
/// Inverse of verbalize_comparison.
std::string parse_comparison(std::string_view english);

}  // namespace pnr
