// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Prompt rendering for style transfer and extraction of the model's
// continuation from delimiter-bounded output.

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pnr {

/// A free-text style descriptor such as "positive" or "formal".
class StyleLabel {
 public:
  explicit StyleLabel(std::string name, bool negated = false);

  const std::string &name() const noexcept { return name_; }
  bool negated() const noexcept { return negated_; }

  /// "not <name>" when negated, otherwise the bare name.
  std::string render() const;

  friend bool operator==(const StyleLabel &, const StyleLabel &) = default;

 private:
  std::string name_;
  bool negated_;
};

enum class DelimiterKind { kIndistinguishable, kComplementary };

class DelimiterPair {
 public:
  DelimiterPair(std::string open, std::string close);

  const std::string &open() const noexcept { return open_; }
  const std::string &close() const noexcept { return close_; }
  DelimiterKind kind() const noexcept {
    return open_ == close_ ? DelimiterKind::kIndistinguishable
                           : DelimiterKind::kComplementary;
  }

  friend bool operator==(const DelimiterPair &, const DelimiterPair &) = default;

 private:
  std::string open_;
  std::string close_;
};

struct NamedDelimiter {
  std::string name;
  DelimiterPair pair;
};

/// The ten built-in boundary markers, in their canonical order:
/// curly, square, angle, paren, quote, dash, triple-angle, blockquote,
/// bullet, liquid.
const std::vector<NamedDelimiter> &builtin_delimiters();

/// Looks up a built-in delimiter by short name; nullopt when unknown.
std::optional<DelimiterPair> find_delimiter(std::string_view name);

enum class TemplateKind { kVanilla, kContrastive, kNegationV1, kNegationV2 };

inline constexpr std::array<TemplateKind, 4> kAllTemplateKinds{
    TemplateKind::kVanilla, TemplateKind::kContrastive,
    TemplateKind::kNegationV1, TemplateKind::kNegationV2};

/// "vanilla", "contrastive", "negation-v1", "negation-v2".
std::string_view template_name(TemplateKind kind) noexcept;
std::optional<TemplateKind> parse_template_kind(std::string_view name) noexcept;

/// A phrasing with {s1} {s2} {x} {d1} {d2} placeholders. The pattern must
/// contain {x} exactly once and end with {d1}, the generation slot.
class PromptTemplate {
 public:
  PromptTemplate(std::string name, std::string pattern);

  static PromptTemplate builtin(TemplateKind kind);

  const std::string &name() const noexcept { return name_; }
  const std::string &pattern() const noexcept { return pattern_; }

  /// Single-pass placeholder substitution; substituted values are never
  /// re-scanned.
  std::string fill(std::string_view s1, std::string_view s2, std::string_view x,
                   const DelimiterPair &delimiter) const;

  friend bool operator==(const PromptTemplate &, const PromptTemplate &) = default;

 private:
  std::string name_;
  std::string pattern_;
};

struct Exemplar {
  std::string input;
  std::string output;
  StyleLabel source_style;
  StyleLabel target_style;
};

struct TransferRequest {
  std::string input_text;
  StyleLabel source_style;
  StyleLabel target_style;
  PromptTemplate prompt_template;
  DelimiterPair delimiter;
  std::vector<Exemplar> exemplars;
};

/// Throws PreconditionError (or DelimiterCollision) when the request breaks
/// an invariant.
void validate(const TransferRequest &req);

/// Exemplar blocks first, each closed by d2, then the query block ending in
/// d1; blocks are joined by a single newline.
std::string render_prompt(const TransferRequest &req);

struct Extraction {
  std::string text;
  bool unterminated = false;
};

/// Cuts raw model output at the first closing delimiter and trims it.
Extraction extract_completion(std::string_view raw, const DelimiterPair &delimiter);

/// `The following text is <mask>: [text].`
std::string render_cloze(std::string_view text, std::string_view mask_token);

/// Templates and delimiters loaded from a JSON document:
///   {"templates": {"name": "pattern", ...},
///    "delimiters": {"name": {"open": "...", "close": "..."}, ...}}
/// Built-ins are always present; file entries with the same name override.
class PromptCatalog {
 public:
  PromptCatalog();

  static PromptCatalog from_json_text(std::string_view text);
  static PromptCatalog from_file(const std::filesystem::path &path);

  std::optional<PromptTemplate> find_template(std::string_view name) const;
  std::optional<DelimiterPair> find_delimiter(std::string_view name) const;

  const std::vector<PromptTemplate> &templates() const noexcept { return templates_; }
  const std::vector<NamedDelimiter> &delimiters() const noexcept { return delimiters_; }

 private:
  std::vector<PromptTemplate> templates_;
  std::vector<NamedDelimiter> delimiters_;
};

}  // namespace pnr
