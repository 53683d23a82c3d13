// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pnr/error.hpp"
#include "pnr/text.hpp"

namespace pnr {

StyleLabel::StyleLabel(std::string name, bool negated)
    : name_(std::move(name)), negated_(negated) {
  if (is_blank(name_)) throw PreconditionError("style label must not be blank");
}

std::string StyleLabel::render() const { return negated_ ? "not " + name_ : name_; }

DelimiterPair::DelimiterPair(std::string open, std::string close)
    : open_(std::move(open)), close_(std::move(close)) {
  if (open_.empty() || close_.empty())
    throw PreconditionError("delimiter markers must be non-empty");
}

const std::vector<NamedDelimiter> &builtin_delimiters() {
  // Angle brackets are ASCII; the bracket-quote and asterisk-quote openers
  // mimic Markdown blockquotes and bullets.
  static const std::vector<NamedDelimiter> kDelimiters{
      {"curly", DelimiterPair("{", "}")},
      {"square", DelimiterPair("[", "]")},
      {"angle", DelimiterPair("<", ">")},
      {"paren", DelimiterPair("(", ")")},
      {"quote", DelimiterPair("\"", "\"")},
      {"dash", DelimiterPair("--", "--")},
      {"triple-angle", DelimiterPair("<<<", ">>>")},
      {"blockquote", DelimiterPair("> \"", "\"")},
      {"bullet", DelimiterPair("* \"", "\"")},
      {"liquid", DelimiterPair("{{", "}}")},
  };
  return kDelimiters;
}

std::optional<DelimiterPair> find_delimiter(std::string_view name) {
  for (const auto &d : builtin_delimiters())
    if (d.name == name) return d.pair;
  return std::nullopt;
}

std::string_view template_name(TemplateKind kind) noexcept {
  switch (kind) {
    case TemplateKind::kVanilla:
      return "vanilla";
    case TemplateKind::kContrastive:
      return "contrastive";
    case TemplateKind::kNegationV1:
      return "negation-v1";
    case TemplateKind::kNegationV2:
      return "negation-v2";
  }
  return "";
}

std::optional<TemplateKind> parse_template_kind(std::string_view name) noexcept {
  for (auto kind : kAllTemplateKinds)
    if (template_name(kind) == name) return kind;
  return std::nullopt;
}

PromptTemplate::PromptTemplate(std::string name, std::string pattern)
    : name_(std::move(name)), pattern_(std::move(pattern)) {
  if (name_.empty()) throw PreconditionError("template name must be non-empty");
  if (count_occurrences(pattern_, "{x}") != 1)
    throw PreconditionError("template '" + name_ + "' must contain {x} exactly once");
  constexpr std::string_view kSlot = "{d1}";
  if (pattern_.size() < kSlot.size() ||
      pattern_.compare(pattern_.size() - kSlot.size(), kSlot.size(), kSlot) != 0)
    throw PreconditionError("template '" + name_ + "' must end with {d1}");
}

PromptTemplate PromptTemplate::builtin(TemplateKind kind) {
  std::string pattern;
  switch (kind) {
    case TemplateKind::kVanilla:
      pattern = "Here is a text: {d1}{x}{d2} Here is a rewrite of the text, which is {s2}: {d1}";
      break;
    case TemplateKind::kContrastive:
      pattern =
          "Here is a text, which is {s1}: {d1}{x}{d2} Here is a rewrite of the text, which is "
          "{s2}: {d1}";
      break;
    case TemplateKind::kNegationV1:
      pattern =
          "Here is a text, which is {s1}: {d1}{x}{d2} Here is a rewrite of the text, which is "
          "not {s1}: {d1}";
      break;
    case TemplateKind::kNegationV2:
      pattern =
          "Here is a text, which is not {s2}: {d1}{x}{d2} Here is a rewrite of the text, which "
          "is {s2}: {d1}";
      break;
  }
  return PromptTemplate(std::string(template_name(kind)), std::move(pattern));
}

std::string PromptTemplate::fill(std::string_view s1, std::string_view s2,
                                 std::string_view x,
                                 const DelimiterPair &delimiter) const {
  struct Slot {
    std::string_view key;
    std::string_view value;
  };
  const Slot slots[] = {{"{s1}", s1},
                        {"{s2}", s2},
                        {"{x}", x},
                        {"{d1}", delimiter.open()},
                        {"{d2}", delimiter.close()}};
  std::string out;
  out.reserve(pattern_.size() + x.size() + 32);
  std::string_view rest = pattern_;
  while (!rest.empty()) {
    bool matched = false;
    if (rest.front() == '{') {
      for (const auto &slot : slots) {
        if (rest.starts_with(slot.key)) {
          out += slot.value;
          rest.remove_prefix(slot.key.size());
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      out += rest.front();
      rest.remove_prefix(1);
    }
  }
  return out;
}

void validate(const TransferRequest &req) {
  if (is_blank(req.input_text)) throw PreconditionError("input text must be non-empty");
  const std::string &close = req.delimiter.close();
  if (req.input_text.find(close) != std::string::npos)
    throw DelimiterCollision("delimiter collision: input text contains closing marker '" +
                             close + "'");
  for (std::size_t i = 0; i < req.exemplars.size(); ++i) {
    const auto &ex = req.exemplars[i];
    const std::string where = "exemplar " + std::to_string(i);
    if (is_blank(ex.input) || is_blank(ex.output))
      throw PreconditionError(where + ": input and output must be non-empty");
    if (!(ex.source_style == req.source_style) || !(ex.target_style == req.target_style))
      throw PreconditionError(where + ": style direction differs from the request");
    if (ex.input.find(close) != std::string::npos || ex.output.find(close) != std::string::npos)
      throw DelimiterCollision("delimiter collision in " + where + ": contains '" + close + "'");
  }
}

std::string render_prompt(const TransferRequest &req) {
  validate(req);
  const std::string s1 = req.source_style.render();
  const std::string s2 = req.target_style.render();
  std::string out;
  for (const auto &ex : req.exemplars) {
    out += req.prompt_template.fill(s1, s2, ex.input, req.delimiter);
    out += ex.output;
    out += req.delimiter.close();
    out += '\n';
  }
  out += req.prompt_template.fill(s1, s2, req.input_text, req.delimiter);
  return out;
}

Extraction extract_completion(std::string_view raw, const DelimiterPair &delimiter) {
  const auto pos = raw.find(delimiter.close());
  if (pos == std::string_view::npos) return {std::string(trim(raw)), true};
  return {std::string(trim(raw.substr(0, pos))), false};
}

std::string render_cloze(std::string_view text, std::string_view mask_token) {
  if (text.empty()) throw PreconditionError("cloze text must be non-empty");
  std::string out = "The following text is ";
  out += mask_token;
  out += ": [";
  out += text;
  out += "].";
  return out;
}

PromptCatalog::PromptCatalog() : delimiters_(builtin_delimiters()) {
  for (auto kind : kAllTemplateKinds) templates_.push_back(PromptTemplate::builtin(kind));
}

PromptCatalog PromptCatalog::from_json_text(std::string_view text) {
  PromptCatalog catalog;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw DataError(std::string("prompt config: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("prompt config: top level must be an object");
  try {
    if (auto it = doc.find("templates"); it != doc.end()) {
      for (const auto &[name, pattern] : it->items()) {
        PromptTemplate t(name, pattern.get<std::string>());
        auto existing = std::find_if(catalog.templates_.begin(), catalog.templates_.end(),
                                     [&](const auto &x) { return x.name() == name; });
        if (existing != catalog.templates_.end())
          *existing = std::move(t);
        else
          catalog.templates_.push_back(std::move(t));
      }
    }
    if (auto it = doc.find("delimiters"); it != doc.end()) {
      for (const auto &[name, spec] : it->items()) {
        NamedDelimiter d{name, DelimiterPair(spec.at("open").get<std::string>(),
                                             spec.at("close").get<std::string>())};
        auto existing = std::find_if(catalog.delimiters_.begin(), catalog.delimiters_.end(),
                                     [&](const auto &x) { return x.name == name; });
        if (existing != catalog.delimiters_.end())
          *existing = std::move(d);
        else
          catalog.delimiters_.push_back(std::move(d));
      }
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("prompt config: ") + e.what());
  } catch (const PreconditionError &e) {
    throw DataError(std::string("prompt config: ") + e.what());
  }
  return catalog;
}

PromptCatalog PromptCatalog::from_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read prompt config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::optional<PromptTemplate> PromptCatalog::find_template(std::string_view name) const {
  for (const auto &t : templates_)
    if (t.name() == name) return t;
  return std::nullopt;
}

std::optional<DelimiterPair> PromptCatalog::find_delimiter(std::string_view name) const {
  for (const auto &d : delimiters_)
    if (d.name == name) return d.pair;
  return std::nullopt;
}

}  // namespace pnr
