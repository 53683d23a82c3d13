// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace pnr {

/// Runs fn(i) for i in [0, n) on at most `jobs` threads. If any call
/// throws, the exception of the lowest failing index is rethrown after all
/// calls finish.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn &&fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
  const int threads = jobs < 1 ? 1 : jobs;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1 && count > 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pnr
