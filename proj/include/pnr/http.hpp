// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// JSON-over-HTTP clients for the service contract in wire.hpp, and a small
// server that exposes any Backends over the same contract.

#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "pnr/backend.hpp"

namespace httplib {
class Server;
}

namespace pnr {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{200};
  std::chrono::milliseconds timeout{30000};
};

/// Posts JSON to base_url + path. Transport failures are retried with
/// exponential backoff; malformed bodies and service errors are not.
/// Each call opens its own connection, so one poster is safe to share.
class JsonPoster {
 public:
  JsonPoster(std::string base_url, RetryPolicy policy);

  nlohmann::json post(const std::string &path, const nlohmann::json &body) const;

  const std::string &base_url() const noexcept { return host_; }

 private:
  std::string host_;    // scheme://host[:port]
  std::string prefix_;  // optional path prefix, no trailing slash
  RetryPolicy policy_;
};

class HttpCompletion : public CompletionService {
 public:
  explicit HttpCompletion(JsonPoster poster) : poster_(std::move(poster)) {}
  CompletionResponse do_complete(const CompletionRequest &req) override;

 private:
  JsonPoster poster_;
};

class HttpTokenScorer : public TokenScorer {
 public:
  explicit HttpTokenScorer(JsonPoster poster) : poster_(std::move(poster)) {}
  TokenScoreResponse do_score_tokens(std::string_view text) override;

 private:
  JsonPoster poster_;
};

class HttpMaskFiller : public MaskFiller {
 public:
  HttpMaskFiller(JsonPoster poster, std::string mask_token)
      : poster_(std::move(poster)), mask_token_(std::move(mask_token)) {}
  std::string mask_token() const override { return mask_token_; }
  MaskFillResponse do_fill_mask(std::string_view text,
                                const std::vector<std::string> &labels) override;

 private:
  JsonPoster poster_;
  std::string mask_token_;
};

class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(JsonPoster poster) : poster_(std::move(poster)) {}
  EmbeddingResponse do_embed_tokens(std::string_view text) override;

 private:
  JsonPoster poster_;
};

/// HTTP handles for every configured URL; unconfigured services stay null.
Backends connect(const BackendEndpoints &endpoints);

/// Serves /complete, /score, /fill_mask and /embed from the given backends on
/// a background thread. The classifier handle answers /classifier/fill_mask,
/// so pointing classifier_url at url() + "/classifier" reaches it.
class ServiceHost {
 public:
  explicit ServiceHost(Backends backends);
  ~ServiceHost();
  ServiceHost(const ServiceHost &) = delete;
  ServiceHost &operator=(const ServiceHost &) = delete;

  /// Binds host:port (port 0 picks a free one) and starts serving.
  /// Returns the bound port.
  int start(const std::string &host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void listen(const std::string &host, int port);
  void stop();

  std::string url() const;

 private:
  void install_routes();

  Backends backends_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace pnr
