// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/mock_backends.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>
#include <unordered_map>

#include "pnr/error.hpp"
#include "pnr/text.hpp"

namespace pnr::mock {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

const std::unordered_map<std::string, std::string> &antonym_lookup() {
  static const auto kLookup = [] {
    std::unordered_map<std::string, std::string> m;
    for (const auto &[pos, neg] : antonym_table()) {
      m.emplace(pos, neg);
      m.emplace(neg, pos);
    }
    return m;
  }();
  return kLookup;
}

const std::set<std::string> &positive_words() {
  static const auto kWords = [] {
    std::set<std::string> s;
    for (const auto &p : antonym_table()) s.insert(p.first);
    return s;
  }();
  return kWords;
}

const std::set<std::string> &negative_words() {
  static const auto kWords = [] {
    std::set<std::string> s;
    for (const auto &p : antonym_table()) s.insert(p.second);
    return s;
  }();
  return kWords;
}

// Lowercased alphabetic runs of text.
std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_alpha(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && is_alpha(text[j])) ++j;
    if (j > i) out.push_back(ascii_lower(text.substr(i, j - i)));
    i = j;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

const std::vector<std::string> kFillers{"really", "indeed", "truly", "honestly", "overall",
                                        "basically", "frankly", "simply"};

}  // namespace

const std::vector<std::pair<std::string, std::string>> &antonym_table() {
  static const std::vector<std::pair<std::string, std::string>> kTable{
      {"good", "bad"},          {"love", "hate"},         {"loved", "hated"},
      {"best", "worst"},        {"great", "terrible"},    {"happy", "sad"},
      {"delicious", "disgusting"}, {"friendly", "rude"}, {"excellent", "awful"},
      {"amazing", "horrible"},  {"nice", "nasty"},        {"fresh", "stale"},
      {"clean", "dirty"},       {"like", "dislike"},      {"wonderful", "dreadful"},
      {"beautiful", "ugly"},    {"perfect", "poor"},      {"recommend", "avoid"},
      {"fast", "slow"},         {"cheap", "overpriced"},
  };
  return kTable;
}

std::string flip_sentiment(std::string_view text) {
  const auto &lookup = antonym_lookup();
  std::string out;
  out.reserve(text.size() + 8);
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_alpha(text[i])) {
      out += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_alpha(text[j])) ++j;
    const std::string_view word = text.substr(i, j - i);
    auto it = lookup.find(ascii_lower(word));
    if (it == lookup.end()) {
      out += word;
    } else {
      std::string repl = it->second;
      if (std::isupper(static_cast<unsigned char>(word.front())))
        repl.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(repl.front())));
      out += repl;
    }
    i = j;
  }
  return out;
}

std::optional<std::pair<std::string, DelimiterPair>> parse_query(
    std::string_view prompt, const std::vector<NamedDelimiter> &delimiters) {
  const auto nl = prompt.rfind('\n');
  const std::string_view line = nl == std::string_view::npos ? prompt : prompt.substr(nl + 1);
  const NamedDelimiter *best = nullptr;
  for (const auto &d : delimiters) {
    if (line.ends_with(d.pair.open()) && (!best || d.pair.open().size() > best->pair.open().size()))
      best = &d;
  }
  if (!best) return std::nullopt;
  const auto open = line.find(best->pair.open());
  const auto start = open + best->pair.open().size();
  const auto close = line.find(best->pair.close(), start);
  if (close == std::string_view::npos || start >= line.size() - best->pair.open().size())
    return std::nullopt;
  return std::make_pair(std::string(line.substr(start, close - start)), best->pair);
}

CompletionResponse EchoGenerator::do_complete(const CompletionRequest &req) {
  std::string text;
  if (canned_) {
    text = *canned_;
  } else {
    auto q = parse_query(req.prompt);
    if (!q) throw BackendError(BackendErrorKind::kService, "echo mock cannot find the query block");
    text = q->first + q->second.close();
  }
  CompletionResponse resp;
  for (int i = 0; i < req.num_candidates; ++i) resp.candidates.push_back({text, 0.0});
  return resp;
}

int LexiconFlipGenerator::flip_rank(const CompletionRequest &req) const {
  const std::int64_t k = req.num_candidates;
  const std::int64_t base = req.seed ? *req.seed : default_flip_rank_;
  return static_cast<int>(((base % k) + k) % k);
}

CompletionResponse LexiconFlipGenerator::do_complete(const CompletionRequest &req) {
  auto q = parse_query(req.prompt);
  if (!q) throw BackendError(BackendErrorKind::kService, "lexicon mock cannot find the query block");
  const auto &[input, delim] = *q;
  const int k = req.num_candidates;
  const int flipped_at = flip_rank(req);

  std::vector<std::string> others;
  others.push_back(input);
  for (int j = 0; static_cast<int>(others.size()) < k - 1; ++j)
    others.push_back(input + " " + kFillers[j % kFillers.size()]);

  CompletionResponse resp;
  std::size_t next_other = 0;
  for (int rank = 0; rank < k; ++rank) {
    const std::string body = rank == flipped_at ? flip_sentiment(input) : others[next_other++];
    resp.candidates.push_back({body + delim.close(), -0.2 * (rank + 1)});
  }
  return resp;
}

TokenScoreResponse LexiconFlipGenerator::do_score_tokens(std::string_view text) {
  const auto &lookup = antonym_lookup();
  TokenScoreResponse resp;
  for (const auto &tok : split_whitespace(text)) {
    const auto words = words_of(tok);
    const bool known = words.size() == 1 && lookup.count(words.front());
    resp.tokens.push_back({tok, known ? -std::log(1000.0) : -std::log(static_cast<double>(vocab_))});
  }
  return resp;
}

TokenScoreResponse UniformScorer::do_score_tokens(std::string_view text) {
  ++calls_;
  TokenScoreResponse resp;
  const double lp = -std::log(static_cast<double>(vocab_));
  for (auto &tok : split_whitespace(text)) resp.tokens.push_back({std::move(tok), lp});
  return resp;
}

MaskFillResponse SentimentMaskFiller::do_fill_mask(std::string_view text,
                                                   const std::vector<std::string> &labels) {
  const auto words = words_of(text);
  MaskFillResponse resp;
  std::map<std::string, int> hits;
  for (const auto &label : labels) {
    if (split_whitespace(label).size() != 1) {
      resp.label_errors[label] = LabelIssue::kNotSingleToken;
      continue;
    }
    const std::set<std::string> *lexicon = nullptr;
    if (label == "positive") lexicon = &positive_words();
    if (label == "negative") lexicon = &negative_words();
    if (!lexicon) {
      resp.label_errors[label] = LabelIssue::kNotInVocab;
      continue;
    }
    int n = 0;
    for (const auto &w : words) n += static_cast<int>(lexicon->count(w));
    hits[label] = n;
  }
  int lo = INT32_MAX, hi = -1;
  for (const auto &[label, n] : hits) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  for (const auto &[label, n] : hits) resp.scores[label] = lo == hi ? 0.5 : (n == hi ? 0.9 : 0.1);
  return resp;
}

MaskFillResponse FixedMaskFiller::do_fill_mask(std::string_view,
                                               const std::vector<std::string> &labels) {
  MaskFillResponse resp;
  for (const auto &label : labels) {
    auto it = raw_.find(label);
    if (it == raw_.end())
      resp.label_errors[label] = LabelIssue::kNotInVocab;
    else
      resp.scores[label] = it->second;
  }
  return resp;
}

EmbeddingResponse HashEmbedder::do_embed_tokens(std::string_view text) {
  EmbeddingResponse resp;
  resp.dim = dim_;
  for (const auto &tok : split_whitespace(text)) {
    std::uint64_t state = fnv1a(ascii_lower(tok));
    std::vector<double> v(static_cast<std::size_t>(dim_));
    for (auto &x : v) x = 2.0 * static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 - 1.0;
    resp.vectors.push_back(std::move(v));
  }
  return resp;
}

EmbeddingResponse TableEmbedder::do_embed_tokens(std::string_view text) {
  EmbeddingResponse resp;
  for (const auto &tok : split_whitespace(text)) {
    auto it = table_.find(tok);
    if (it == table_.end()) throw PreconditionError("no vector for token '" + tok + "'");
    resp.dim = static_cast<int>(it->second.size());
    resp.vectors.push_back(it->second);
  }
  return resp;
}

Backends standard_backends() {
  auto generator = std::make_shared<LexiconFlipGenerator>();
  auto sentiment = std::make_shared<SentimentMaskFiller>();
  Backends b;
  b.generator = generator;
  b.fluency = generator;
  b.mlm = sentiment;
  b.classifier = sentiment;
  b.embedder = std::make_shared<HashEmbedder>();
  return b;
}

}  // namespace pnr::mock
