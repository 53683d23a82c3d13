// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP counterparts.

#include <random>

#include <benchmark/benchmark.h>

#include "pnr/kernels.hpp"

namespace {

using namespace pnr::kernels;

std::vector<std::string> corpus(std::size_t n, std::uint64_t seed) {
  static const char *words[] = {"the", "food", "was", "good", ",", "great", "service", "3.50", "we'll", "back."};
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const auto len = 5 + rng() % 30;
    for (std::size_t j = 0; j < len; ++j) s += std::string(j ? " " : "") + words[rng() % 10];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Vector> vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vector> out(n, Vector(dim));
  for (auto &v : out)
    for (auto &x : v) x = g(rng);
  return out;
}

void BM_Tokenize(benchmark::State &state, bool parallel) {
  const auto texts = corpus(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? tokenize_all(texts) : tokenize_all_serial(texts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorpusStats(benchmark::State &state, bool parallel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto h = tokenize_all(corpus(n, 2)), r = tokenize_all(corpus(n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(parallel ? corpus_stats(h, r) : corpus_stats_serial(h, r));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GreedyMatch(benchmark::State &state, bool parallel) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = vectors(n, 768, 4), b = vectors(n, 768, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? greedy_match(a, b) : greedy_match_serial(a, b));
}

BENCHMARK_CAPTURE(BM_Tokenize, serial, false)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_Tokenize, parallel, true)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_CorpusStats, serial, false)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_CorpusStats, parallel, true)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_GreedyMatch, serial, false)->Arg(32)->Arg(128);
BENCHMARK_CAPTURE(BM_GreedyMatch, parallel, true)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
