// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Automatic evaluation: corpus BLEU against references or sources,
// sentence GLEU, corpus perplexity, classifier accuracy and exact match.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pnr/backend.hpp"
#include "pnr/kernels.hpp"

namespace pnr {

/// Lowercases, splits punctuation off words in the style of the 13a
/// tokenizer (periods and commas stay inside numbers, dashes split only
/// after a digit, apostrophes stay attached) and splits on whitespace.
std::vector<std::string> tokenize_eval(std::string_view text);

struct BleuReport {
  double score = 0.0;  // [0, 100]
  std::array<double, kernels::kMaxOrder> precisions{};
  double brevity_penalty = 1.0;
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
};

/// Turns summed n-gram statistics into a score. Orders n >= 2 with zero
/// matches use the add-one precision 1 / (total + 1); zero unigram matches
/// give a score of 0.
BleuReport bleu_from_stats(const kernels::NgramStats &stats);

/// Corpus BLEU-4 over tokenize_eval tokens.
BleuReport corpus_bleu(std::span<const std::string> hyps, std::span<const std::string> refs);
BleuReport corpus_bleu_serial(std::span<const std::string> hyps,
                              std::span<const std::string> refs);

/// BLEU of outputs against their own sources; high values mean copying.
double self_sbleu(std::span<const std::string> outputs, std::span<const std::string> sources);
double ref_sbleu(std::span<const std::string> outputs, std::span<const std::string> references);

/// Sentence-level GLEU in [0, 1]. Per order n, the precision numerator is
/// the hypothesis n-grams matched by the reference minus those copied from
/// the source beyond what the reference licenses:
///   sum_g min(H,R)(g) - sum_g max(0, min(H,S)(g) - min(H,R)(g)),
/// floored at 0, over the hypothesis n-gram count. Orders longer than the
/// hypothesis are skipped; the brevity penalty compares to the reference.
double sentence_gleu(std::string_view source, std::string_view hypothesis,
                     std::string_view reference);

/// exp(-(sum of all token logprobs) / (total token count)).
double corpus_perplexity(std::span<const std::string> texts, TokenScorer &scorer, int jobs = 4);

/// Fraction of pairs whose trimmed strings are byte-equal.
double exact_match_accuracy(std::span<const std::string> outputs,
                            std::span<const std::string> references);

struct StyleDirection {
  std::string source;
  std::string target;

  std::string to_string() const { return source + "->" + target; }
  friend auto operator<=>(const StyleDirection &, const StyleDirection &) = default;
};

/// Asks the classifier for {source, target} on each output and counts the
/// outputs where the target label scores strictly higher.
double classifier_accuracy(std::span<const std::string> outputs,
                           std::span<const StyleDirection> directions, MaskFiller &classifier,
                           int jobs = 4);

struct EvalSummary {
  std::optional<double> r_sbleu;
  std::optional<double> s_sbleu;
  std::optional<double> accuracy;
  std::optional<double> ppl;
  std::optional<double> gleu;  // mean sentence GLEU, [0, 1]
  std::optional<double> exact_match;

  friend bool operator==(const EvalSummary &, const EvalSummary &) = default;
};

nlohmann::json to_json(const EvalSummary &s);
EvalSummary eval_summary_from_json(const nlohmann::json &j);

/// Inputs for a summary; empty optional spans disable the matching metric.
struct EvalInputs {
  std::span<const std::string> outputs;
  std::span<const std::string> sources;
  /// Either empty or parallel to outputs.
  std::span<const std::string> references;
  std::span<const StyleDirection> directions;
  MaskFiller *classifier = nullptr;
  TokenScorer *fluency = nullptr;
  int jobs = 4;
};

/// s-sBLEU when sources are given; r-sBLEU, GLEU and exact match when
/// references are given; accuracy and perplexity when their backends are.
EvalSummary evaluate(const EvalInputs &in);

}  // namespace pnr
