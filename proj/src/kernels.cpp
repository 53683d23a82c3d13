// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pnr/metrics.hpp"

namespace pnr::kernels {

namespace {

double dot(const Vector &a, const Vector &b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<Vector> normalized(std::span<const Vector> vs) {
  std::vector<Vector> out(vs.begin(), vs.end());
  for (auto &v : out) {
    const double n = std::sqrt(dot(v, v));
    for (auto &x : v) x /= n;
  }
  return out;
}

double clamp_cos(double c) { return std::clamp(c, -1.0, 1.0); }

GreedyMatch finish(const std::vector<double> &sim, std::size_t rows, std::size_t cols) {
  GreedyMatch m;
  double recall_sum = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < cols; ++j) best = std::max(best, sim[i * cols + j]);
    recall_sum += best;
  }
  double precision_sum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    double best = -1.0;
    for (std::size_t i = 0; i < rows; ++i) best = std::max(best, sim[i * cols + j]);
    precision_sum += best;
  }
  m.recall = recall_sum / static_cast<double>(rows);
  m.precision = precision_sum / static_cast<double>(cols);
  const double denom = m.precision + m.recall;
  m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
  return m;
}

using NgramCounts = std::map<std::vector<std::string>, std::int64_t>;

NgramCounts count_ngrams(const Tokens &toks, std::size_t n) {
  NgramCounts counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i)
    ++counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  return counts;
}

}  // namespace

GreedyMatch greedy_match(std::span<const Vector> reference, std::span<const Vector> candidate) {
  const auto ref = normalized(reference);
  const auto cand = normalized(candidate);
  const std::size_t rows = ref.size(), cols = cand.size();
  std::vector<double> sim(rows * cols);
  const auto n = static_cast<std::int64_t>(rows * cols);
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::int64_t idx = 0; idx < n; ++idx) {
    const auto i = static_cast<std::size_t>(idx) / cols;
    const auto j = static_cast<std::size_t>(idx) % cols;
    sim[idx] = clamp_cos(dot(ref[i], cand[j]));
  }
  return finish(sim, rows, cols);
}

GreedyMatch greedy_match_serial(std::span<const Vector> reference,
                                std::span<const Vector> candidate) {
  const auto ref = normalized(reference);
  const auto cand = normalized(candidate);
  const std::size_t rows = ref.size(), cols = cand.size();
  std::vector<double> sim(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) sim[i * cols + j] = clamp_cos(dot(ref[i], cand[j]));
  return finish(sim, rows, cols);
}

NgramStats &NgramStats::operator+=(const NgramStats &o) noexcept {
  for (int n = 0; n < kMaxOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

NgramStats sentence_stats(const Tokens &hyp, const Tokens &ref) {
  NgramStats s;
  s.hyp_len = static_cast<std::int64_t>(hyp.size());
  s.ref_len = static_cast<std::int64_t>(ref.size());
  for (int n = 1; n <= kMaxOrder; ++n) {
    const auto hyp_counts = count_ngrams(hyp, n);
    const auto ref_counts = count_ngrams(ref, n);
    for (const auto &[gram, c] : hyp_counts) {
      s.totals[n - 1] += c;
      if (auto it = ref_counts.find(gram); it != ref_counts.end())
        s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

NgramStats corpus_stats(std::span<const Tokens> hyps, std::span<const Tokens> refs) {
  const auto n = static_cast<std::int64_t>(hyps.size());
  std::int64_t matches[kMaxOrder] = {}, totals[kMaxOrder] = {};
  std::int64_t hyp_len = 0, ref_len = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : matches[:kMaxOrder], totals[:kMaxOrder], hyp_len, ref_len)
  for (std::int64_t i = 0; i < n; ++i) {
    const NgramStats s = sentence_stats(hyps[i], refs[i]);
    for (int k = 0; k < kMaxOrder; ++k) {
      matches[k] += s.matches[k];
      totals[k] += s.totals[k];
    }
    hyp_len += s.hyp_len;
    ref_len += s.ref_len;
  }
  NgramStats out;
  std::copy(std::begin(matches), std::end(matches), out.matches.begin());
  std::copy(std::begin(totals), std::end(totals), out.totals.begin());
  out.hyp_len = hyp_len;
  out.ref_len = ref_len;
  return out;
}

NgramStats corpus_stats_serial(std::span<const Tokens> hyps, std::span<const Tokens> refs) {
  NgramStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += sentence_stats(hyps[i], refs[i]);
  return total;
}

std::vector<Tokens> tokenize_all(std::span<const std::string> texts) {
  std::vector<Tokens> out(texts.size());
  const auto n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t i = 0; i < n; ++i) out[i] = tokenize_eval(texts[i]);
  return out;
}

std::vector<Tokens> tokenize_all_serial(std::span<const std::string> texts) {
  std::vector<Tokens> out;
  out.reserve(texts.size());
  for (const auto &t : texts) out.push_back(tokenize_eval(t));
  return out;
}

}  // namespace pnr::kernels
