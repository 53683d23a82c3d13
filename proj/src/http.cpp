// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/http.hpp"

#include <httplib.h>

#include "pnr/error.hpp"
#include "pnr/wire.hpp"

namespace pnr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(BackendErrorKind kind, const std::string &what, int attempts = 1,
                       int status = 0) {
  throw BackendError(kind, what, attempts, status);
}

}  // namespace

JsonPoster::JsonPoster(std::string base_url, RetryPolicy policy) : policy_(policy) {
  const auto scheme = base_url.find("://");
  if (scheme == std::string::npos) throw PreconditionError("endpoint URL needs a scheme: " + base_url);
  const auto slash = base_url.find('/', scheme + 3);
  host_ = base_url.substr(0, slash);
  if (slash != std::string::npos) {
    prefix_ = base_url.substr(slash);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  if (policy_.max_attempts < 1) throw PreconditionError("max_attempts must be >= 1");
}

json JsonPoster::post(const std::string &path, const json &body) const {
  const std::string payload = body.dump();
  const std::string target = prefix_ + path;
  std::string last_error;
  for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    httplib::Client cli(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(policy_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());

    auto res = cli.Post(target, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      if (attempt < policy_.max_attempts)
        std::this_thread::sleep_for(policy_.backoff_base * (1 << (attempt - 1)));
      continue;
    }
    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::parse_error &) {
      if (res->status != 200)
        fail(BackendErrorKind::kService, host_ + target + " returned HTTP " + std::to_string(res->status),
             attempt, res->status);
      fail(BackendErrorKind::kMalformed, host_ + target + " returned a non-JSON body", attempt,
           res->status);
    }
    if (parsed.is_object() && parsed.contains("error")) {
      const auto &err = parsed["error"];
      fail(BackendErrorKind::kService, err.is_string() ? err.get<std::string>() : err.dump(),
           attempt, res->status);
    }
    if (res->status != 200)
      fail(BackendErrorKind::kService, host_ + target + " returned HTTP " + std::to_string(res->status),
           attempt, res->status);
    return parsed;
  }
  fail(BackendErrorKind::kTransport, host_ + target + ": " + last_error, policy_.max_attempts);
}

CompletionResponse HttpCompletion::do_complete(const CompletionRequest &req) {
  return wire::decode_completion_response(poster_.post("/complete", wire::encode(req)));
}

TokenScoreResponse HttpTokenScorer::do_score_tokens(std::string_view text) {
  return wire::decode_score_response(poster_.post("/score", wire::encode_text_request(text)));
}

MaskFillResponse HttpMaskFiller::do_fill_mask(std::string_view text,
                                              const std::vector<std::string> &labels) {
  return wire::decode_fill_response(poster_.post("/fill_mask", wire::encode_fill_request(text, labels)));
}

EmbeddingResponse HttpEmbedder::do_embed_tokens(std::string_view text) {
  return wire::decode_embed_response(poster_.post("/embed", wire::encode_text_request(text)));
}

Backends connect(const BackendEndpoints &endpoints) {
  const RetryPolicy policy{endpoints.max_attempts, endpoints.backoff_base, endpoints.timeout};
  Backends b;
  if (!endpoints.complete_url.empty())
    b.generator = std::make_shared<HttpCompletion>(JsonPoster(endpoints.complete_url, policy));
  if (!endpoints.score_url.empty())
    b.fluency = std::make_shared<HttpTokenScorer>(JsonPoster(endpoints.score_url, policy));
  if (!endpoints.fill_mask_url.empty())
    b.mlm = std::make_shared<HttpMaskFiller>(JsonPoster(endpoints.fill_mask_url, policy),
                                             endpoints.mask_token);
  if (!endpoints.embed_url.empty())
    b.embedder = std::make_shared<HttpEmbedder>(JsonPoster(endpoints.embed_url, policy));
  if (!endpoints.classifier_url.empty())
    b.classifier = std::make_shared<HttpMaskFiller>(JsonPoster(endpoints.classifier_url, policy),
                                                    endpoints.mask_token);
  return b;
}

ServiceHost::ServiceHost(Backends backends)
    : backends_(std::move(backends)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ServiceHost::~ServiceHost() { stop(); }

void ServiceHost::install_routes() {
  // Wraps a handler so contract and backend failures become JSON errors.
  auto route = [this](const char *path, auto handler) {
    server_->Post(path, [handler](const httplib::Request &req, httplib::Response &res) {
      try {
        const json body = json::parse(req.body);
        res.set_content(handler(body).dump(), "application/json");
      } catch (const json::exception &e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const PreconditionError &e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const std::exception &e) {
        res.status = 500;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    });
  };
  auto unavailable = [](const char *what) {
    return std::runtime_error(std::string(what) + " service not configured");
  };

  route("/complete", [this, unavailable](const json &body) {
    if (!backends_.generator) throw unavailable("completion");
    return wire::encode(complete(*backends_.generator, wire::decode_completion_request(body)));
  });
  route("/score", [this, unavailable](const json &body) {
    if (!backends_.fluency) throw unavailable("scoring");
    return wire::encode(score_tokens(*backends_.fluency, wire::decode_text_request(body)));
  });
  route("/fill_mask", [this, unavailable](const json &body) {
    if (!backends_.mlm) throw unavailable("mask-fill");
    auto [text, labels] = wire::decode_fill_request(body);
    return wire::encode(backends_.mlm->do_fill_mask(text, labels));
  });
  route("/classifier/fill_mask", [this, unavailable](const json &body) {
    if (!backends_.classifier) throw unavailable("classifier");
    auto [text, labels] = wire::decode_fill_request(body);
    return wire::encode(backends_.classifier->do_fill_mask(text, labels));
  });
  route("/embed", [this, unavailable](const json &body) {
    if (!backends_.embedder) throw unavailable("embedding");
    return wire::encode(embed_tokens(*backends_.embedder, wire::decode_text_request(body)));
  });
}

int ServiceHost::start(const std::string &host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ServiceHost::listen(const std::string &host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port))
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void ServiceHost::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string ServiceHost::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

}  // namespace pnr
