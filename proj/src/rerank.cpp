// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/rerank.hpp"

#include <algorithm>
#include <cmath>

#include "pnr/error.hpp"
#include "pnr/kernels.hpp"
#include "pnr/parallel.hpp"
#include "pnr/text.hpp"

namespace pnr {

namespace {

double floored_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

double normalized_strength(const MaskFillResponse &resp, const StyleLabel &source,
                           const StyleLabel &target) {
  if (!resp.label_errors.empty()) {
    const auto &[label, issue] = *resp.label_errors.begin();
    if (issue == LabelIssue::kNotSingleToken)
      throw BackendError(BackendErrorKind::kLabelNotSingleToken,
                         "style label '" + label + "' is not a single token");
    throw BackendError(BackendErrorKind::kLabelNotInVocab,
                       "style label '" + label + "' is not in the vocabulary");
  }
  return l1_strength(resp.scores.at(source.name()), resp.scores.at(target.name()));
}

void require_distinct(const StyleLabel &source, const StyleLabel &target) {
  if (source.name() == target.name())
    throw PreconditionError("source and target style must differ");
}

}  // namespace

bool Candidate::empty_generation() const noexcept { return is_blank(text); }

std::string_view to_string(StrengthSource s) noexcept {
  return s == StrengthSource::kMlmCloze ? "mlm_cloze" : "external_classifier";
}

void validate(const RerankConfig &cfg) {
  if (cfg.k < 1) throw PreconditionError("k must be >= 1");
  if (cfg.max_in_flight < 1) throw PreconditionError("max_in_flight must be >= 1");
}

double composite_of(double log_similarity, double log_strength,
                    std::optional<double> log_fluency) noexcept {
  return log_similarity + log_strength + (log_fluency ? *log_fluency : 0.0);
}

double similarity_score(std::string_view source, std::string_view candidate, Embedder &embedder) {
  const auto a = embed_tokens(embedder, source);
  const auto b = embed_tokens(embedder, candidate);
  const auto m = kernels::greedy_match(a.vectors, b.vectors);
  return std::clamp(m.f1, kProbabilityFloor, 1.0);
}

double l1_strength(double raw_source, double raw_target) {
  if (!(raw_source >= 0.0) || !(raw_target >= 0.0))
    throw PreconditionError("raw likelihoods must be non-negative");
  const double total = raw_source + raw_target;
  return total > 0.0 ? raw_target / total : 0.5;
}

double style_strength(std::string_view candidate, const StyleLabel &source,
                      const StyleLabel &target, MaskFiller &mlm) {
  require_distinct(source, target);
  const std::string cloze = render_cloze(candidate, mlm.mask_token());
  return normalized_strength(fill_mask(mlm, cloze, {source.name(), target.name()}), source, target);
}

double classifier_strength(std::string_view candidate, const StyleLabel &source,
                           const StyleLabel &target, MaskFiller &classifier) {
  require_distinct(source, target);
  return normalized_strength(classify(classifier, candidate, {source.name(), target.name()}),
                             source, target);
}

double fluency_logprob(std::string_view candidate, TokenScorer &scorer) {
  return score_tokens(scorer, candidate).total();
}

RerankScore score_candidate(std::string_view source, const Candidate &candidate,
                            const StyleLabel &source_style, const StyleLabel &target_style,
                            const RerankConfig &cfg, const Backends &backends) {
  if (!backends.embedder) throw PreconditionError("reranking needs an embedding backend");
  RerankScore s;
  s.log_similarity = floored_log(similarity_score(source, candidate.text, *backends.embedder));
  double strength;
  if (cfg.strength_source == StrengthSource::kMlmCloze) {
    if (!backends.mlm) throw PreconditionError("cloze strength needs a mask-fill backend");
    strength = style_strength(candidate.text, source_style, target_style, *backends.mlm);
  } else {
    if (!backends.classifier) throw PreconditionError("classifier strength needs a classifier backend");
    strength = classifier_strength(candidate.text, source_style, target_style, *backends.classifier);
  }
  s.log_strength = floored_log(strength);
  if (cfg.use_fluency) {
    if (!backends.fluency) throw PreconditionError("fluency term needs a scoring backend");
    s.log_fluency = fluency_logprob(candidate.text, *backends.fluency);
  }
  s.composite = composite_of(s.log_similarity, s.log_strength, s.log_fluency);
  return s;
}

std::size_t argmax_composite(std::span<const RerankScore> scores) {
  if (scores.empty()) throw PreconditionError("cannot pick a winner from an empty pool");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i].composite > scores[best].composite) best = i;
  return best;
}

RerankResult rerank(const TransferRequest &req, std::span<const Candidate> pool,
                    const RerankConfig &cfg, const Backends &backends) {
  validate(cfg);
  if (pool.empty()) throw PreconditionError("cannot rerank an empty pool");
  RerankResult result;
  result.scores.resize(pool.size());
  parallel_for(pool.size(), cfg.max_in_flight, [&](std::size_t i) {
    result.scores[i] = score_candidate(req.input_text, pool[i], req.source_style,
                                       req.target_style, cfg, backends);
  });
  result.winner = argmax_composite(result.scores);
  return result;
}

std::size_t top_beam_baseline(std::span<const Candidate> pool) {
  if (pool.empty()) throw PreconditionError("cannot pick a baseline from an empty pool");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i)
    if (pool[i].gen_score > pool[best].gen_score) best = i;
  return best;
}

nlohmann::json to_json(const RerankScore &s) {
  return {{"log_similarity", s.log_similarity},
          {"log_strength", s.log_strength},
          {"log_fluency", s.log_fluency ? nlohmann::json(*s.log_fluency) : nlohmann::json(nullptr)},
          {"composite", s.composite}};
}

RerankScore rerank_score_from_json(const nlohmann::json &j) {
  RerankScore s;
  s.log_similarity = j.at("log_similarity").get<double>();
  s.log_strength = j.at("log_strength").get<double>();
  if (auto it = j.find("log_fluency"); it != j.end() && !it->is_null()) s.log_fluency = it->get<double>();
  s.composite = j.at("composite").get<double>();
  return s;
}

nlohmann::json score_record(std::span<const Candidate> pool, const RerankResult &result,
                            std::size_t baseline) {
  nlohmann::json texts = nlohmann::json::array(), scores = nlohmann::json::array();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    texts.push_back(pool[i].text);
    scores.push_back(to_json(result.scores.at(i)));
  }
  return {{"candidates", texts},
          {"scores", scores},
          {"winner", result.winner},
          {"baseline", baseline}};
}

}  // namespace pnr
