// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/wire.hpp"

#include <cmath>

#include "pnr/error.hpp"

namespace pnr::wire {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string &what) {
  throw BackendError(BackendErrorKind::kMalformed, what);
}

const json &field(const json &j, const char *key) {
  if (!j.is_object()) malformed("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json &j, const char *key) {
  const json &v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double to_double(const json &v, const char *what) {
  if (!v.is_number()) malformed(std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) malformed(std::string(what) + " must be finite");
  return d;
}

int get_int(const json &j, const char *key) {
  const json &v = field(j, key);
  if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

std::string_view to_string(LabelIssue issue) noexcept {
  return issue == LabelIssue::kNotInVocab ? "not_in_vocabulary" : "not_single_token";
}

json encode(const CompletionRequest &req) {
  json j;
  j["prompt"] = req.prompt;
  j["max_new_tokens"] = req.max_new_tokens;
  j["num_candidates"] = req.num_candidates;
  j["stop"] = req.stop ? json(*req.stop) : json(nullptr);
  j["seed"] = req.seed ? json(*req.seed) : json(nullptr);
  const int width = req.decode.beam_width > 0 ? req.decode.beam_width : req.num_candidates;
  j["decode"] = {{"mode", std::string(to_string(req.decode.mode))},
                 {"beam_width", width},
                 {"temperature", req.decode.temperature}};
  return j;
}

CompletionRequest decode_completion_request(const json &j) {
  CompletionRequest req;
  req.prompt = get_string(j, "prompt");
  req.max_new_tokens = get_int(j, "max_new_tokens");
  req.num_candidates = get_int(j, "num_candidates");
  if (auto it = j.find("stop"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) malformed("field 'stop' must be a string or null");
    req.stop = it->get<std::string>();
  }
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) malformed("field 'seed' must be an integer or null");
    req.seed = it->get<std::int64_t>();
  }
  if (auto it = j.find("decode"); it != j.end() && !it->is_null()) {
    auto mode = parse_decode_mode(get_string(*it, "mode"));
    if (!mode) malformed("decode.mode must be 'beam' or 'sample'");
    req.decode.mode = *mode;
    req.decode.beam_width = get_int(*it, "beam_width");
    req.decode.temperature = to_double(field(*it, "temperature"), "decode.temperature");
  }
  return req;
}

json encode(const CompletionResponse &resp) {
  json cands = json::array();
  for (const auto &c : resp.candidates) cands.push_back({{"text", c.text}, {"gen_score", c.gen_score}});
  return {{"candidates", cands}};
}

CompletionResponse decode_completion_response(const json &j) {
  const json &cands = field(j, "candidates");
  if (!cands.is_array()) malformed("'candidates' must be an array");
  CompletionResponse resp;
  for (const auto &c : cands)
    resp.candidates.push_back({get_string(c, "text"), to_double(field(c, "gen_score"), "gen_score")});
  return resp;
}

json encode_text_request(std::string_view text) { return {{"text", std::string(text)}}; }

std::string decode_text_request(const json &j) { return get_string(j, "text"); }

json encode_fill_request(std::string_view text, const std::vector<std::string> &labels) {
  return {{"text", std::string(text)}, {"labels", labels}};
}

std::pair<std::string, std::vector<std::string>> decode_fill_request(const json &j) {
  std::pair<std::string, std::vector<std::string>> out;
  out.first = get_string(j, "text");
  const json &labels = field(j, "labels");
  if (!labels.is_array()) malformed("'labels' must be an array");
  for (const auto &l : labels) {
    if (!l.is_string()) malformed("labels must be strings");
    out.second.push_back(l.get<std::string>());
  }
  return out;
}

json encode(const TokenScoreResponse &resp) {
  json toks = json::array();
  for (const auto &t : resp.tokens) toks.push_back({{"token", t.token}, {"logprob", t.logprob}});
  return {{"tokens", toks}};
}

TokenScoreResponse decode_score_response(const json &j) {
  const json &toks = field(j, "tokens");
  if (!toks.is_array()) malformed("'tokens' must be an array");
  TokenScoreResponse resp;
  for (const auto &t : toks)
    resp.tokens.push_back({get_string(t, "token"), to_double(field(t, "logprob"), "logprob")});
  return resp;
}

json encode(const MaskFillResponse &resp) {
  json j;
  j["scores"] = json::object();
  for (const auto &[label, raw] : resp.scores) j["scores"][label] = raw;
  if (!resp.label_errors.empty()) {
    j["errors"] = json::object();
    for (const auto &[label, issue] : resp.label_errors) j["errors"][label] = std::string(to_string(issue));
  }
  return j;
}

MaskFillResponse decode_fill_response(const json &j) {
  const json &scores = field(j, "scores");
  if (!scores.is_object()) malformed("'scores' must be an object");
  MaskFillResponse resp;
  for (const auto &[label, raw] : scores.items()) resp.scores[label] = to_double(raw, "likelihood");
  if (auto it = j.find("errors"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) malformed("'errors' must be an object");
    for (const auto &[label, issue] : it->items()) {
      if (!issue.is_string()) malformed("label issue must be a string");
      const auto s = issue.get<std::string>();
      if (s == "not_in_vocabulary")
        resp.label_errors[label] = LabelIssue::kNotInVocab;
      else if (s == "not_single_token")
        resp.label_errors[label] = LabelIssue::kNotSingleToken;
      else
        malformed("unknown label issue '" + s + "'");
    }
  }
  return resp;
}

json encode(const EmbeddingResponse &resp) { return {{"dim", resp.dim}, {"vectors", resp.vectors}}; }

EmbeddingResponse decode_embed_response(const json &j) {
  EmbeddingResponse resp;
  resp.dim = get_int(j, "dim");
  const json &vecs = field(j, "vectors");
  if (!vecs.is_array()) malformed("'vectors' must be an array");
  for (const auto &v : vecs) {
    if (!v.is_array()) malformed("each vector must be an array");
    std::vector<double> row;
    row.reserve(v.size());
    for (const auto &x : v) row.push_back(to_double(x, "embedding component"));
    resp.vectors.push_back(std::move(row));
  }
  return resp;
}

}  // namespace pnr::wire
