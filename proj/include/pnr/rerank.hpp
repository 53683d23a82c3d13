// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Candidate reranking. Each candidate rewrite is scored by the product of
// three factors, combined in log space:
//
//   similarity  greedy-match F1 of contextual token embeddings between the
//               source and the candidate;
//   strength    p(target style | candidate), from a masked LM filling the
//               cloze "The following text is <mask>: [candidate]." over the
//               two style words, l1-normalized (or from an external
//               classifier with the same response shape);
//   fluency     the candidate's log-likelihood under a language model
//               (optional).
//
// The winner is the argmax of the composite, ties going to the earliest
// candidate.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pnr/backend.hpp"
#include "pnr/prompt.hpp"

namespace pnr {

/// Lower bound applied to the similarity and strength probabilities before
/// taking logs.
inline constexpr double kProbabilityFloor = 1e-9;

struct Candidate {
  std::string text;
  double gen_score = 0.0;
  bool unterminated = false;
  /// Position in the generator's output.
  std::size_t index = 0;

  bool empty_generation() const noexcept;
};

enum class StrengthSource { kMlmCloze, kExternalClassifier };

std::string_view to_string(StrengthSource s) noexcept;

struct RerankConfig {
  int k = 3;
  bool use_fluency = true;
  StrengthSource strength_source = StrengthSource::kMlmCloze;
  /// Candidates scored concurrently.
  int max_in_flight = 4;
};

void validate(const RerankConfig &cfg);

struct RerankScore {
  double log_similarity = 0.0;
  double log_strength = 0.0;
  /// Present only when fluency is enabled.
  std::optional<double> log_fluency;
  double composite = 0.0;
};

/// Composite of the enabled log-factors.
double composite_of(double log_similarity, double log_strength,
                    std::optional<double> log_fluency) noexcept;

/// Greedy-match F1 in (0, 1]; symmetric in its arguments.
double similarity_score(std::string_view source, std::string_view candidate, Embedder &embedder);

/// raw_target / (raw_source + raw_target), or 0.5 when both are zero.
double l1_strength(double raw_source, double raw_target);

/// Cloze probability that the candidate carries the target style.
double style_strength(std::string_view candidate, const StyleLabel &source,
                      const StyleLabel &target, MaskFiller &mlm);

/// Same normalization with a classifier that reads the plain candidate.
double classifier_strength(std::string_view candidate, const StyleLabel &source,
                           const StyleLabel &target, MaskFiller &classifier);

/// Sum of per-token log-probabilities.
double fluency_logprob(std::string_view candidate, TokenScorer &scorer);

RerankScore score_candidate(std::string_view source, const Candidate &candidate,
                            const StyleLabel &source_style, const StyleLabel &target_style,
                            const RerankConfig &cfg, const Backends &backends);

/// Index of the highest composite; the first one on ties.
std::size_t argmax_composite(std::span<const RerankScore> scores);

struct RerankResult {
  std::size_t winner = 0;  // position in the pool
  std::vector<RerankScore> scores;  // parallel to the pool
};

RerankResult rerank(const TransferRequest &req, std::span<const Candidate> pool,
                    const RerankConfig &cfg, const Backends &backends);

/// Position of the highest gen_score; the first one on ties.
std::size_t top_beam_baseline(std::span<const Candidate> pool);

nlohmann::json to_json(const RerankScore &s);
RerankScore rerank_score_from_json(const nlohmann::json &j);

/// Per-example record: candidate texts, factors, winner and baseline.
nlohmann::json score_record(std::span<const Candidate> pool, const RerankResult &result,
                            std::size_t baseline);

}  // namespace pnr
