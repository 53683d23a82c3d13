// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end orchestration: render the prompt, ask the generator for k
// candidates, cut them at the closing delimiter, rerank, and evaluate.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnr/backend.hpp"
#include "pnr/datasets.hpp"
#include "pnr/metrics.hpp"
#include "pnr/prompt.hpp"
#include "pnr/rerank.hpp"

namespace pnr {

struct PipelineConfig {
  RerankConfig rerank;
  DecodeParams decode;
  int max_new_tokens = 64;
  /// Example i of a corpus run is generated with seed + i.
  std::optional<std::int64_t> seed;
  /// Examples in flight at once.
  int jobs = 4;
  /// Free-form description of the backends, copied into manifests.
  nlohmann::json backend_info = "unspecified";
};

void validate(const PipelineConfig &cfg);

using ExemplarPool = std::map<StyleDirection, std::vector<Exemplar>>;

/// Everything about a request except the example itself.
struct RequestTemplate {
  PromptTemplate prompt_template = PromptTemplate::builtin(TemplateKind::kContrastive);
  std::string delimiter_name = "curly";
  DelimiterPair delimiter = DelimiterPair("{", "}");
  /// Number of exemplars prepended; taken in order from the pool entry for
  /// the record's direction.
  int shots = 0;
  ExemplarPool exemplars;
};

/// Builds exemplars from records that carry a reference.
ExemplarPool exemplars_from_records(const std::vector<StylePairRecord> &records);

TransferRequest make_request(const StylePairRecord &record, const RequestTemplate &tmpl);

struct ExampleRecord {
  std::string id;
  std::string source;
  std::optional<std::string> reference;
  std::string source_style;
  std::string target_style;
  std::string prompt;
  std::vector<GeneratedText> raw;
  /// Extracted candidates, one per raw continuation, in generation order.
  std::vector<Candidate> candidates;
  /// Generation indices of the candidates that were reranked.
  std::vector<std::size_t> pool;
  /// Parallel to pool.
  std::vector<RerankScore> scores;
  /// Generation indices.
  std::size_t winner = 0;
  std::size_t baseline = 0;
  std::optional<std::string> error;

  bool ok() const noexcept { return !error.has_value(); }
  const std::string &winner_text() const { return candidates.at(winner).text; }
  const std::string &baseline_text() const { return candidates.at(baseline).text; }
};

nlohmann::json to_json(const ExampleRecord &r);
ExampleRecord example_from_json(const nlohmann::json &j);

struct TransferOutcome {
  Candidate winner;
  Candidate baseline;
  ExampleRecord record;
};

/// Generates k candidates with the closing delimiter as stop string,
/// extracts them, drops empty generations and reranks the rest.
TransferOutcome transfer_one(const TransferRequest &req, const PipelineConfig &cfg,
                             const Backends &backends, std::string id = "example",
                             std::optional<std::int64_t> seed = std::nullopt);

struct RunManifest {
  std::string run_id;
  std::string timestamp;
  nlohmann::json config;
  std::vector<ExampleRecord> records;
  std::optional<EvalSummary> summary;
  std::optional<EvalSummary> baseline_summary;

  std::size_t failures() const noexcept;
  /// True when no example succeeded.
  bool run_failed() const noexcept { return failures() == records.size(); }
};

/// Metrics over the successful examples of a run, using the winners (or
/// the top-beam baseline) as outputs.
EvalSummary summarize(const std::vector<ExampleRecord> &records, bool use_baseline,
                      const Backends &backends, int jobs);

/// Runs every record; per-example failures are recorded and the run goes on.
RunManifest transfer_corpus(const std::vector<StylePairRecord> &records, const RequestTemplate &tmpl,
                            const PipelineConfig &cfg, const Backends &backends);

nlohmann::json config_snapshot(const RequestTemplate &tmpl, const PipelineConfig &cfg);

/// One header object, then one object per example.
void write_manifest(std::ostream &out, const RunManifest &m);
void write_manifest(const std::filesystem::path &path, const RunManifest &m);
RunManifest read_manifest(std::istream &in);
RunManifest read_manifest(const std::filesystem::path &path);

struct SweepGrid {
  std::vector<PromptTemplate> templates;
  std::vector<NamedDelimiter> delimiters;
  std::vector<StyleDirection> directions;
  std::vector<int> shots{0};
  ExemplarPool exemplars;
};

void validate(const SweepGrid &grid);

/// The distinct directions of a dataset in order of first appearance.
std::vector<StyleDirection> directions_of(const std::vector<StylePairRecord> &records);

struct SweepRow {
  std::string template_name;
  std::string delimiter_name;
  std::string direction;
  int shots = 0;
  std::optional<EvalSummary> summary;
  std::string status = "ok";
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RunManifest> manifests;  // parallel to rows; empty manifest on cell failure
};

/// One corpus run per (template, delimiter, direction, shots) cell, in that
/// nesting order. A failing cell yields a row with status "error: ...".
SweepResult run_sweep(const std::vector<StylePairRecord> &records, const SweepGrid &grid,
                      const PipelineConfig &cfg, const Backends &backends);

/// Columns: template, delimiter, direction, shots, accuracy, r_sbleu,
/// s_sbleu, ppl, status. Metrics use 4 decimals; absent ones are empty.
std::string sweep_csv(const std::vector<SweepRow> &rows);

/// Outputs = sources.
EvalSummary copy_baseline(const std::vector<StylePairRecord> &records, const Backends &backends,
                          int jobs = 4);

}  // namespace pnr
