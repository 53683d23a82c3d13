// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Data-parallel inner loops of the scorer and the metrics. Each kernel has
// an OpenMP version and a serial reference with the same arithmetic; the
// two must agree bit for bit, which the unit tests and the benchmark check.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pnr::kernels {

using Vector = std::vector<double>;
using Tokens = std::vector<std::string>;

/// Greedy-matching F1 over cosine similarities of token vectors.
/// Recall matches every reference vector to its most similar candidate
/// vector, precision the other way round.
struct GreedyMatch {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

GreedyMatch greedy_match(std::span<const Vector> reference, std::span<const Vector> candidate);
GreedyMatch greedy_match_serial(std::span<const Vector> reference,
                                std::span<const Vector> candidate);

inline constexpr int kMaxOrder = 4;

/// Clipped n-gram statistics for BLEU, summed over a corpus.
struct NgramStats {
  std::array<std::int64_t, kMaxOrder> matches{};
  std::array<std::int64_t, kMaxOrder> totals{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;

  NgramStats &operator+=(const NgramStats &o) noexcept;
  friend bool operator==(const NgramStats &, const NgramStats &) = default;
};

NgramStats sentence_stats(const Tokens &hyp, const Tokens &ref);

NgramStats corpus_stats(std::span<const Tokens> hyps, std::span<const Tokens> refs);
NgramStats corpus_stats_serial(std::span<const Tokens> hyps, std::span<const Tokens> refs);

/// Tokenizes every text with the evaluation tokenizer.
std::vector<Tokens> tokenize_all(std::span<const std::string> texts);
std::vector<Tokens> tokenize_all_serial(std::span<const std::string> texts);

}  // namespace pnr::kernels
