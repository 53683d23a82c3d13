// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "pnr/error.hpp"
#include "pnr/text.hpp"

namespace pnr {

namespace {

[[noreturn]] void malformed(const std::string &what) {
  throw BackendError(BackendErrorKind::kMalformed, what);
}

void check_labels(const std::vector<std::string> &labels) {
  const std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() != labels.size())
    throw PreconditionError("label set contains duplicates");
  if (distinct.size() < 2) throw PreconditionError("need at least two distinct labels");
  for (const auto &l : labels)
    if (is_blank(l)) throw PreconditionError("labels must be non-blank");
}

void check_fill_response(const MaskFillResponse &resp, const std::vector<std::string> &labels) {
  std::set<std::string> seen;
  for (const auto &[label, raw] : resp.scores) {
    if (!std::isfinite(raw) || raw < 0.0) malformed("likelihood for '" + label + "' is not a finite non-negative number");
    seen.insert(label);
  }
  for (const auto &[label, issue] : resp.label_errors) {
    if (!seen.insert(label).second) malformed("label '" + label + "' is both scored and rejected");
  }
  const std::set<std::string> wanted(labels.begin(), labels.end());
  if (seen != wanted) malformed("response label set differs from the requested labels");
}

}  // namespace

std::string_view to_string(DecodeMode mode) noexcept {
  return mode == DecodeMode::kBeam ? "beam" : "sample";
}

std::optional<DecodeMode> parse_decode_mode(std::string_view s) noexcept {
  if (s == "beam") return DecodeMode::kBeam;
  if (s == "sample") return DecodeMode::kSample;
  return std::nullopt;
}

double TokenScoreResponse::total() const noexcept {
  double sum = 0.0;
  for (const auto &t : tokens) sum += t.logprob;
  return sum;
}

void validate(const CompletionRequest &req) {
  if (req.prompt.empty()) throw PreconditionError("prompt must be non-empty");
  if (req.max_new_tokens < 1) throw PreconditionError("max_new_tokens must be >= 1");
  if (req.num_candidates < 1) throw PreconditionError("num_candidates must be >= 1");
  if (req.decode.beam_width < 0) throw PreconditionError("beam_width must be >= 0");
  if (!(req.decode.temperature > 0.0) || !std::isfinite(req.decode.temperature))
    throw PreconditionError("temperature must be a positive finite number");
}

CompletionResponse complete(CompletionService &svc, const CompletionRequest &req) {
  validate(req);
  CompletionResponse resp = svc.do_complete(req);
  if (resp.candidates.empty()) malformed("completion returned no candidates");
  for (const auto &c : resp.candidates)
    if (!std::isfinite(c.gen_score)) malformed("non-finite gen_score");
  std::stable_sort(resp.candidates.begin(), resp.candidates.end(),
                   [](const auto &a, const auto &b) { return a.gen_score > b.gen_score; });
  return resp;
}

TokenScoreResponse score_tokens(TokenScorer &svc, std::string_view text) {
  if (is_blank(text)) throw PreconditionError("cannot score empty text");
  TokenScoreResponse resp = svc.do_score_tokens(text);
  if (resp.tokens.empty()) malformed("score returned no tokens");
  for (const auto &t : resp.tokens)
    if (!std::isfinite(t.logprob) || t.logprob > 0.0)
      malformed("logprob for token '" + t.token + "' is not finite and <= 0");
  return resp;
}

MaskFillResponse fill_mask(MaskFiller &svc, std::string_view cloze,
                           const std::vector<std::string> &labels) {
  const std::string mask = svc.mask_token();
  if (count_occurrences(cloze, mask) != 1)
    throw PreconditionError("cloze must contain the mask token '" + mask + "' exactly once");
  check_labels(labels);
  MaskFillResponse resp = svc.do_fill_mask(cloze, labels);
  check_fill_response(resp, labels);
  return resp;
}

MaskFillResponse classify(MaskFiller &svc, std::string_view text,
                          const std::vector<std::string> &labels) {
  if (is_blank(text)) throw PreconditionError("cannot classify empty text");
  check_labels(labels);
  MaskFillResponse resp = svc.do_fill_mask(text, labels);
  check_fill_response(resp, labels);
  return resp;
}

EmbeddingResponse embed_tokens(Embedder &svc, std::string_view text) {
  if (is_blank(text)) throw PreconditionError("cannot embed blank text");
  EmbeddingResponse resp = svc.do_embed_tokens(text);
  if (resp.dim <= 0) malformed("embedding dim must be positive");
  if (resp.vectors.empty()) malformed("embedding returned no vectors");
  for (const auto &v : resp.vectors) {
    if (static_cast<int>(v.size()) != resp.dim) malformed("embedding vector has wrong dim");
    bool nonzero = false;
    for (double x : v) {
      if (!std::isfinite(x)) malformed("non-finite embedding component");
      nonzero = nonzero || x != 0.0;
    }
    if (!nonzero) malformed("all-zero embedding vector");
  }
  return resp;
}

BackendEndpoints BackendEndpoints::from_env() {
  BackendEndpoints e;
  auto read = [](const char *name, std::string &dst) {
    if (const char *v = std::getenv(name); v && *v) dst = v;
  };
  read("PNR_COMPLETE_URL", e.complete_url);
  read("PNR_SCORE_URL", e.score_url);
  read("PNR_FILL_MASK_URL", e.fill_mask_url);
  read("PNR_EMBED_URL", e.embed_url);
  read("PNR_CLASSIFIER_URL", e.classifier_url);
  read("PNR_MASK_TOKEN", e.mask_token);
  if (const char *v = std::getenv("PNR_TIMEOUT_MS"); v && *v) {
    char *end = nullptr;
    const long ms = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || ms <= 0)
      throw PreconditionError("PNR_TIMEOUT_MS must be a positive integer");
    e.timeout = std::chrono::milliseconds(ms);
  }
  return e;
}

}  // namespace pnr
