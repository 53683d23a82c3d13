// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic in-process backends. Every mock answers the same request
// with a byte-identical response and is safe to call from many threads.

#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnr/backend.hpp"
#include "pnr/prompt.hpp"

namespace pnr::mock {

/// The published antonym table: (positive word, negative word).
const std::vector<std::pair<std::string, std::string>> &antonym_table();

/// Swaps every word found in the antonym table for its partner, keeping
/// surrounding punctuation and a leading capital.
std::string flip_sentiment(std::string_view text);

/// Recovers (input text, delimiter) from the query block of a rendered
/// prompt: the last line, whose tail is the longest matching open marker.
std::optional<std::pair<std::string, DelimiterPair>> parse_query(
    std::string_view prompt, const std::vector<NamedDelimiter> &delimiters = builtin_delimiters());

/// Returns k copies of a canned string, or, in copying mode, k copies of
/// the query input followed by the closing delimiter.
class EchoGenerator : public CompletionService {
 public:
  explicit EchoGenerator(std::string canned) : canned_(std::move(canned)) {}
  static EchoGenerator copying() { return EchoGenerator(); }

  CompletionResponse do_complete(const CompletionRequest &req) override;

 private:
  EchoGenerator() = default;
  std::optional<std::string> canned_;
};

/// Candidate pool for a sentiment prompt: one antonym-flipped rewrite, one
/// verbatim copy, then copies padded with a neutral word. The flipped
/// candidate sits at rank `seed mod k` when the request carries a seed,
/// otherwise at `default_flip_rank mod k`. Also a token scorer: lexicon
/// words cost -ln(1000), everything else -ln(vocab).
class LexiconFlipGenerator : public CompletionService, public TokenScorer {
 public:
  explicit LexiconFlipGenerator(int default_flip_rank = 0, int vocab = 50257)
      : default_flip_rank_(default_flip_rank), vocab_(vocab) {}

  CompletionResponse do_complete(const CompletionRequest &req) override;
  TokenScoreResponse do_score_tokens(std::string_view text) override;

  /// Rank of the flipped candidate for this request.
  int flip_rank(const CompletionRequest &req) const;

 private:
  int default_flip_rank_;
  int vocab_;
};

/// Every whitespace token costs -ln(vocab).
class UniformScorer : public TokenScorer {
 public:
  explicit UniformScorer(int vocab = 50257) : vocab_(vocab) {}

  TokenScoreResponse do_score_tokens(std::string_view text) override;
  int calls() const noexcept { return calls_.load(); }

 private:
  int vocab_;
  std::atomic<int> calls_{0};
};

/// Cloze classifier over the antonym table. Labels "positive" and
/// "negative" count hits in their half of the table; labels with the
/// most hits get 0.9, the rest 0.1, and all-equal counts give 0.5 each.
/// Other labels are reported as not in the vocabulary, labels containing
/// whitespace as not single-token.
class SentimentMaskFiller : public MaskFiller {
 public:
  explicit SentimentMaskFiller(std::string mask = "<mask>") : mask_(std::move(mask)) {}

  std::string mask_token() const override { return mask_; }
  MaskFillResponse do_fill_mask(std::string_view text,
                                const std::vector<std::string> &labels) override;

 private:
  std::string mask_;
};

/// Returns fixed raw likelihoods regardless of the text.
class FixedMaskFiller : public MaskFiller {
 public:
  explicit FixedMaskFiller(std::map<std::string, double> raw, std::string mask = "<mask>")
      : raw_(std::move(raw)), mask_(std::move(mask)) {}

  std::string mask_token() const override { return mask_; }
  MaskFillResponse do_fill_mask(std::string_view text,
                                const std::vector<std::string> &labels) override;

 private:
  std::map<std::string, double> raw_;
  std::string mask_;
};

/// One pseudo-random vector per whitespace token, keyed by the lowercased
/// token, so equal tokens embed identically.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(int dim = 32) : dim_(dim) {}

  EmbeddingResponse do_embed_tokens(std::string_view text) override;
  int dim() const noexcept { return dim_; }

 private:
  int dim_;
};

/// Hand-specified token vectors; unknown tokens are a precondition error.
class TableEmbedder : public Embedder {
 public:
  explicit TableEmbedder(std::map<std::string, std::vector<double>> table)
      : table_(std::move(table)) {}

  EmbeddingResponse do_embed_tokens(std::string_view text) override;

 private:
  std::map<std::string, std::vector<double>> table_;
};

/// Delegates to a callable; used to script failures and odd responses.
class CallbackGenerator : public CompletionService {
 public:
  using Fn = std::function<CompletionResponse(const CompletionRequest &)>;
  explicit CallbackGenerator(Fn fn) : fn_(std::move(fn)) {}

  CompletionResponse do_complete(const CompletionRequest &req) override { return fn_(req); }

 private:
  Fn fn_;
};

/// The standard mock set: lexicon-flip generator (also the fluency
/// scorer), sentiment cloze filler as both MLM and classifier, and the
/// hash embedder.
Backends standard_backends();

}  // namespace pnr::mock
