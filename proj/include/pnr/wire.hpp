// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// JSON bodies of the HTTP service contract:
//   POST /complete   {"prompt","max_new_tokens","num_candidates","stop","seed",
//                     "decode":{"mode","beam_width","temperature"}}
//                    -> {"candidates":[{"text","gen_score"}]}
//   POST /score      {"text"} -> {"tokens":[{"token","logprob"}]}
//   POST /fill_mask  {"text","labels":[...]} -> {"scores":{label: raw},
//                                                "errors":{label: issue}}
//   POST /embed      {"text"} -> {"dim":N,"vectors":[[...]]}
// A service reports failure with a non-200 status or {"error": "..."}.
// Decoders throw BackendError(kMalformed) on any schema violation.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pnr/backend.hpp"

namespace pnr::wire {

nlohmann::json encode(const CompletionRequest &req);
CompletionRequest decode_completion_request(const nlohmann::json &j);

nlohmann::json encode(const CompletionResponse &resp);
CompletionResponse decode_completion_response(const nlohmann::json &j);

nlohmann::json encode_text_request(std::string_view text);
std::string decode_text_request(const nlohmann::json &j);

nlohmann::json encode_fill_request(std::string_view text, const std::vector<std::string> &labels);
std::pair<std::string, std::vector<std::string>> decode_fill_request(const nlohmann::json &j);

nlohmann::json encode(const TokenScoreResponse &resp);
TokenScoreResponse decode_score_response(const nlohmann::json &j);

nlohmann::json encode(const MaskFillResponse &resp);
MaskFillResponse decode_fill_response(const nlohmann::json &j);

nlohmann::json encode(const EmbeddingResponse &resp);
EmbeddingResponse decode_embed_response(const nlohmann::json &j);

std::string_view to_string(LabelIssue issue) noexcept;

}  // namespace pnr::wire
