// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Contracts for the four model services the method talks to: a generator,
// a token scorer (fluency), a mask filler (cloze classifier or external
// style classifier) and a token embedder (similarity).
//
// Service implementations only move data. The free functions below
// (complete, score_tokens, fill_mask, classify, embed_tokens) check the
// request preconditions and the response invariants around every call, so
// callers never see a response that breaks the contract.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pnr {

enum class DecodeMode { kBeam, kSample };

std::string_view to_string(DecodeMode mode) noexcept;
std::optional<DecodeMode> parse_decode_mode(std::string_view s) noexcept;

struct DecodeParams {
  DecodeMode mode = DecodeMode::kBeam;
  /// 0 means "same as num_candidates".
  int beam_width = 0;
  double temperature = 1.0;

  friend bool operator==(const DecodeParams &, const DecodeParams &) = default;
};

struct CompletionRequest {
  std::string prompt;
  int max_new_tokens = 64;
  int num_candidates = 3;
  std::optional<std::string> stop;
  std::optional<std::int64_t> seed;
  DecodeParams decode;

  friend bool operator==(const CompletionRequest &, const CompletionRequest &) = default;
};

struct GeneratedText {
  std::string text;
  /// Length-normalized log-probability under the generator.
  double gen_score = 0.0;

  friend bool operator==(const GeneratedText &, const GeneratedText &) = default;
};

struct CompletionResponse {
  std::vector<GeneratedText> candidates;

  friend bool operator==(const CompletionResponse &, const CompletionResponse &) = default;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;

  friend bool operator==(const TokenLogprob &, const TokenLogprob &) = default;
};

struct TokenScoreResponse {
  std::vector<TokenLogprob> tokens;

  double total() const noexcept;

  friend bool operator==(const TokenScoreResponse &, const TokenScoreResponse &) = default;
};

enum class LabelIssue { kNotInVocab, kNotSingleToken };

struct MaskFillResponse {
  /// Raw (unnormalized) likelihood of each label at the mask position.
  std::map<std::string, double> scores;
  /// Labels the service could not score.
  std::map<std::string, LabelIssue> label_errors;

  friend bool operator==(const MaskFillResponse &, const MaskFillResponse &) = default;
};

struct EmbeddingResponse {
  int dim = 0;
  std::vector<std::vector<double>> vectors;

  friend bool operator==(const EmbeddingResponse &, const EmbeddingResponse &) = default;
};

class CompletionService {
 public:
  virtual ~CompletionService() = default;
  virtual CompletionResponse do_complete(const CompletionRequest &req) = 0;
};

class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual TokenScoreResponse do_score_tokens(std::string_view text) = 0;
};

class MaskFiller {
 public:
  virtual ~MaskFiller() = default;
  virtual std::string mask_token() const = 0;
  virtual MaskFillResponse do_fill_mask(std::string_view text,
                                        const std::vector<std::string> &labels) = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingResponse do_embed_tokens(std::string_view text) = 0;
};

/// Checked entry points. Precondition violations throw PreconditionError,
/// contract violations in the response throw BackendError(kMalformed).
CompletionResponse complete(CompletionService &svc, const CompletionRequest &req);
TokenScoreResponse score_tokens(TokenScorer &svc, std::string_view text);
/// The cloze must contain the service's mask token exactly once.
MaskFillResponse fill_mask(MaskFiller &svc, std::string_view cloze,
                           const std::vector<std::string> &labels);
/// Same wire shape as fill_mask, for a classifier that reads plain text.
MaskFillResponse classify(MaskFiller &svc, std::string_view text,
                          const std::vector<std::string> &labels);
EmbeddingResponse embed_tokens(Embedder &svc, std::string_view text);

/// Throws PreconditionError when the request breaks an invariant.
void validate(const CompletionRequest &req);

/// Where the services live. Empty URLs mean "not configured".
struct BackendEndpoints {
  std::string complete_url;
  std::string score_url;
  std::string fill_mask_url;
  std::string embed_url;
  std::string classifier_url;
  std::string mask_token = "<mask>";
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{200};

  /// Reads PNR_COMPLETE_URL, PNR_SCORE_URL, PNR_FILL_MASK_URL,
  /// PNR_EMBED_URL, PNR_CLASSIFIER_URL, PNR_MASK_TOKEN and PNR_TIMEOUT_MS.
  static BackendEndpoints from_env();
};

/// Live service handles used by the reranker and the pipeline. Any of them
/// may be null when the corresponding step is disabled.
struct Backends {
  std::shared_ptr<CompletionService> generator;
  std::shared_ptr<TokenScorer> fluency;
  std::shared_ptr<MaskFiller> mlm;
  std::shared_ptr<Embedder> embedder;
  std::shared_ptr<MaskFiller> classifier;
};

}  // namespace pnr
