// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/metrics.hpp"

#include <cctype>
#include <cmath>
#include <map>

#include "pnr/error.hpp"
#include "pnr/parallel.hpp"
#include "pnr/text.hpp"

namespace pnr {

namespace {

bool is_digit(int c) { return c >= '0' && c <= '9'; }

bool splits_always(char c) {
  switch (c) {
    case '!': case '"': case '#': case '$': case '%': case '&': case '(': case ')':
    case '*': case '+': case '/': case ':': case ';': case '<': case '=': case '>':
    case '?': case '@': case '[': case '\\': case ']': case '^': case '_': case '`':
    case '{': case '|': case '}': case '~':
      return true;
    default:
      return false;
  }
}

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

void require_parallel(std::size_t a, std::size_t b, const char *what) {
  if (a != b)
    throw PreconditionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  if (a == 0) throw PreconditionError(std::string(what) + ": empty corpus");
}

using Counts = std::map<std::vector<std::string>, std::int64_t>;

Counts ngrams(const std::vector<std::string> &toks, std::size_t n) {
  Counts c;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++c[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  return c;
}

std::int64_t count_in(const Counts &c, const std::vector<std::string> &g) {
  auto it = c.find(g);
  return it == c.end() ? 0 : it->second;
}

}  // namespace

std::vector<std::string> tokenize_eval(std::string_view text) {
  const std::string lower = ascii_lower(text);
  std::string spaced;
  spaced.reserve(lower.size() * 2);
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const char c = lower[i];
    const int prev = i > 0 ? static_cast<unsigned char>(lower[i - 1]) : ' ';
    const int next = i + 1 < lower.size() ? static_cast<unsigned char>(lower[i + 1]) : ' ';
    if (splits_always(c)) {
      spaced += ' ';
      spaced += c;
      spaced += ' ';
    } else if (c == '.' || c == ',') {
      // Only a separator inside a number ("3.50", "1,000") stays attached.
      const bool numeric = is_digit(prev) && is_digit(next);
      if (!numeric) spaced += ' ';
      spaced += c;
      if (!numeric) spaced += ' ';
    } else if (c == '-' && is_digit(prev)) {
      spaced += " - ";
    } else {
      spaced += c;
    }
  }
  return split_whitespace(spaced);
}

BleuReport bleu_from_stats(const kernels::NgramStats &stats) {
  BleuReport r;
  r.hyp_len = stats.hyp_len;
  r.ref_len = stats.ref_len;
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < kernels::kMaxOrder; ++n) {
    const auto m = stats.matches[n], t = stats.totals[n];
    double p;
    if (n == 0)
      p = t > 0 ? static_cast<double>(m) / static_cast<double>(t) : 0.0;
    else
      p = m == 0 ? 1.0 / static_cast<double>(t + 1) : static_cast<double>(m) / static_cast<double>(t);
    r.precisions[n] = p;
    if (p <= 0.0)
      zero = true;
    else
      log_sum += std::log(p);
  }
  // An empty hypothesis side has no defined length ratio; report 0.
  if (stats.hyp_len == 0)
    r.brevity_penalty = 0.0;
  else if (stats.hyp_len < stats.ref_len)
    r.brevity_penalty = std::exp(1.0 - static_cast<double>(stats.ref_len) / static_cast<double>(stats.hyp_len));
  else
    r.brevity_penalty = 1.0;
  r.score = zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum / kernels::kMaxOrder);
  r.score = std::min(r.score, 100.0);
  return r;
}

BleuReport corpus_bleu(std::span<const std::string> hyps, std::span<const std::string> refs) {
  require_parallel(hyps.size(), refs.size(), "corpus_bleu");
  const auto h = kernels::tokenize_all(hyps);
  const auto r = kernels::tokenize_all(refs);
  return bleu_from_stats(kernels::corpus_stats(h, r));
}

BleuReport corpus_bleu_serial(std::span<const std::string> hyps,
                              std::span<const std::string> refs) {
  require_parallel(hyps.size(), refs.size(), "corpus_bleu");
  const auto h = kernels::tokenize_all_serial(hyps);
  const auto r = kernels::tokenize_all_serial(refs);
  return bleu_from_stats(kernels::corpus_stats_serial(h, r));
}

double self_sbleu(std::span<const std::string> outputs, std::span<const std::string> sources) {
  return corpus_bleu(outputs, sources).score;
}

double ref_sbleu(std::span<const std::string> outputs, std::span<const std::string> references) {
  return corpus_bleu(outputs, references).score;
}

double sentence_gleu(std::string_view source, std::string_view hypothesis,
                     std::string_view reference) {
  if (is_blank(source) || is_blank(hypothesis) || is_blank(reference))
    throw PreconditionError("sentence_gleu needs non-empty source, hypothesis and reference");
  const auto src = tokenize_eval(source);
  const auto hyp = tokenize_eval(hypothesis);
  const auto ref = tokenize_eval(reference);
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= kernels::kMaxOrder && n <= hyp.size(); ++n) {
    const auto h = ngrams(hyp, n), s = ngrams(src, n), r = ngrams(ref, n);
    std::int64_t matched = 0, penalty = 0, total = 0;
    for (const auto &[g, hc] : h) {
      total += hc;
      const auto hr = std::min(hc, count_in(r, g));
      const auto hs = std::min(hc, count_in(s, g));
      matched += hr;
      penalty += std::max<std::int64_t>(0, hs - hr);
    }
    const auto numerator = std::max<std::int64_t>(0, matched - penalty);
    if (numerator == 0) return 0.0;
    log_sum += std::log(static_cast<double>(numerator) / static_cast<double>(total));
    ++orders;
  }
  const double c = static_cast<double>(hyp.size()), rl = static_cast<double>(ref.size());
  const double bp = std::exp(std::min(0.0, 1.0 - rl / c));
  return std::min(1.0, bp * std::exp(log_sum / orders));
}

double corpus_perplexity(std::span<const std::string> texts, TokenScorer &scorer, int jobs) {
  if (texts.empty()) throw PreconditionError("corpus_perplexity: empty corpus");
  std::vector<double> sums(texts.size());
  std::vector<std::size_t> counts(texts.size());
  parallel_for(texts.size(), jobs, [&](std::size_t i) {
    const auto resp = score_tokens(scorer, texts[i]);
    CompensatedSum s;
    for (const auto &t : resp.tokens) s.add(t.logprob);
    sums[i] = s.value();
    counts[i] = resp.tokens.size();
  });
  CompensatedSum total;
  std::size_t tokens = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    total.add(sums[i]);
    tokens += counts[i];
  }
  return std::exp(-total.value() / static_cast<double>(tokens));
}

double exact_match_accuracy(std::span<const std::string> outputs,
                            std::span<const std::string> references) {
  require_parallel(outputs.size(), references.size(), "exact_match_accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    hits += trim(outputs[i]) == trim(references[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(outputs.size());
}

double classifier_accuracy(std::span<const std::string> outputs,
                           std::span<const StyleDirection> directions, MaskFiller &classifier,
                           int jobs) {
  require_parallel(outputs.size(), directions.size(), "classifier_accuracy");
  std::vector<char> hit(outputs.size(), 0);
  parallel_for(outputs.size(), jobs, [&](std::size_t i) {
    if (is_blank(outputs[i])) return;
    const auto &d = directions[i];
    const auto resp = classify(classifier, outputs[i], {d.source, d.target});
    if (!resp.label_errors.empty()) {
      const auto &[label, issue] = *resp.label_errors.begin();
      throw BackendError(issue == LabelIssue::kNotInVocab ? BackendErrorKind::kLabelNotInVocab
                                                          : BackendErrorKind::kLabelNotSingleToken,
                         "classifier cannot score label '" + label + "'");
    }
    hit[i] = resp.scores.at(d.target) > resp.scores.at(d.source) ? 1 : 0;
  });
  std::size_t hits = 0;
  for (char h : hit) hits += static_cast<std::size_t>(h);
  return static_cast<double>(hits) / static_cast<double>(outputs.size());
}

nlohmann::json to_json(const EvalSummary &s) {
  nlohmann::json j = nlohmann::json::object();
  auto put = [&j](const char *key, const std::optional<double> &v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  put("r_sbleu", s.r_sbleu);
  put("s_sbleu", s.s_sbleu);
  put("accuracy", s.accuracy);
  put("ppl", s.ppl);
  put("gleu", s.gleu);
  put("exact_match", s.exact_match);
  return j;
}

EvalSummary eval_summary_from_json(const nlohmann::json &j) {
  EvalSummary s;
  auto get = [&j](const char *key) -> std::optional<double> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw DataError(std::string("summary field '") + key + "' must be a number");
    return it->get<double>();
  };
  s.r_sbleu = get("r_sbleu");
  s.s_sbleu = get("s_sbleu");
  s.accuracy = get("accuracy");
  s.ppl = get("ppl");
  s.gleu = get("gleu");
  s.exact_match = get("exact_match");
  return s;
}

EvalSummary evaluate(const EvalInputs &in) {
  EvalSummary s;
  if (in.outputs.empty()) throw PreconditionError("evaluate: no outputs");
  if (!in.sources.empty()) s.s_sbleu = self_sbleu(in.outputs, in.sources);
  if (!in.references.empty()) {
    s.r_sbleu = ref_sbleu(in.outputs, in.references);
    s.exact_match = exact_match_accuracy(in.outputs, in.references);
    if (in.sources.size() == in.outputs.size()) {
      CompensatedSum g;
      for (std::size_t i = 0; i < in.outputs.size(); ++i) {
        const bool usable = !is_blank(in.sources[i]) && !is_blank(in.outputs[i]) &&
                            !is_blank(in.references[i]);
        g.add(usable ? sentence_gleu(in.sources[i], in.outputs[i], in.references[i]) : 0.0);
      }
      s.gleu = g.value() / static_cast<double>(in.outputs.size());
    }
  }
  if (in.classifier && !in.directions.empty())
    s.accuracy = classifier_accuracy(in.outputs, in.directions, *in.classifier, in.jobs);
  if (in.fluency) {
    std::vector<std::string> scorable;
    for (const auto &o : in.outputs)
      if (!is_blank(o)) scorable.push_back(o);
    if (!scorable.empty()) s.ppl = corpus_perplexity(scorable, *in.fluency, in.jobs);
  }
  return s;
}

}  // namespace pnr
