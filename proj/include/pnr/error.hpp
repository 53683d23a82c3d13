// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pnr {

/// A caller broke an operation's precondition (empty text, k = 0, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input text contains the closing delimiter of the chosen pair.
class DelimiterCollision : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Grammar mismatch with the character offset where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Malformed dataset or config input; line is 1-based, 0 when not applicable.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string &what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class BackendErrorKind {
  kTransport,       // connection refused, timeout, ...
  kMalformed,       // response does not satisfy the wire contract
  kService,         // the service answered with an error
  kLabelNotInVocab, // a requested label is not a vocabulary entry
  kLabelNotSingleToken,
};

const char *to_string(BackendErrorKind kind) noexcept;

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string &what,
               int attempts = 1, int http_status = 0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        attempts_(attempts),
        http_status_(http_status) {}

  BackendErrorKind kind() const noexcept { return kind_; }
  /// Number of attempts made before giving up.
  int attempts() const noexcept { return attempts_; }
  int http_status() const noexcept { return http_status_; }
  bool retryable() const noexcept { return kind_ == BackendErrorKind::kTransport; }

 private:
  BackendErrorKind kind_;
  int attempts_;
  int http_status_;
};

}  // namespace pnr
