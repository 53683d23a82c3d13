// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnr/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "pnr/error.hpp"
#include "pnr/parallel.hpp"
#include "pnr/text.hpp"

namespace pnr {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string run_id_for(const json &config, const std::vector<StylePairRecord> &records) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  mix(config.dump());
  for (const auto &r : records) {
    mix(r.id);
    mix(r.source);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_label_error(const BackendError &e) {
  return e.kind() == BackendErrorKind::kLabelNotInVocab ||
         e.kind() == BackendErrorKind::kLabelNotSingleToken;
}

json candidate_json(const Candidate &c) {
  return {{"text", c.text}, {"gen_score", c.gen_score}, {"unterminated", c.unterminated}, {"index", c.index}};
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_number(const std::optional<double> &v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

void validate(const PipelineConfig &cfg) {
  validate(cfg.rerank);
  if (cfg.max_new_tokens < 1) throw PreconditionError("max_new_tokens must be >= 1");
  if (cfg.jobs < 1) throw PreconditionError("jobs must be >= 1");
  if (cfg.decode.beam_width < 0) throw PreconditionError("beam_width must be >= 0");
  if (!(cfg.decode.temperature > 0.0)) throw PreconditionError("temperature must be positive");
}

ExemplarPool exemplars_from_records(const std::vector<StylePairRecord> &records) {
  ExemplarPool pool;
  for (const auto &r : records) {
    if (!r.reference) continue;
    pool[{r.source_style.render(), r.target_style.render()}].push_back(
        Exemplar{r.source, *r.reference, r.source_style, r.target_style});
  }
  return pool;
}

TransferRequest make_request(const StylePairRecord &record, const RequestTemplate &tmpl) {
  TransferRequest req{record.source, record.source_style, record.target_style,
                      tmpl.prompt_template, tmpl.delimiter, {}};
  if (tmpl.shots > 0) {
    const StyleDirection dir{record.source_style.render(), record.target_style.render()};
    // The query never serves as its own demonstration.
    std::vector<Exemplar> usable;
    if (auto it = tmpl.exemplars.find(dir); it != tmpl.exemplars.end())
      for (const auto &ex : it->second)
        if (ex.input != record.source) usable.push_back(ex);
    if (usable.size() < static_cast<std::size_t>(tmpl.shots))
      throw PreconditionError(std::to_string(tmpl.shots) + "-shot prompt needs " +
                              std::to_string(tmpl.shots) + " exemplars for " + dir.to_string() +
                              ", have " + std::to_string(usable.size()));
    usable.erase(usable.begin() + tmpl.shots, usable.end());
    req.exemplars = std::move(usable);
  }
  return req;
}

json to_json(const ExampleRecord &r) {
  json j;
  j["type"] = "example";
  j["id"] = r.id;
  j["source"] = r.source;
  j["reference"] = r.reference ? json(*r.reference) : json(nullptr);
  j["source_style"] = r.source_style;
  j["target_style"] = r.target_style;
  j["prompt"] = r.prompt;
  j["raw"] = json::array();
  for (const auto &g : r.raw) j["raw"].push_back({{"text", g.text}, {"gen_score", g.gen_score}});
  j["candidates"] = json::array();
  for (const auto &c : r.candidates) j["candidates"].push_back(candidate_json(c));
  j["pool"] = r.pool;
  j["scores"] = json::array();
  for (const auto &s : r.scores) j["scores"].push_back(to_json(s));
  if (r.ok()) {
    j["winner"] = r.winner;
    j["baseline"] = r.baseline;
    j["winner_text"] = r.winner_text();
    j["baseline_text"] = r.baseline_text();
    j["error"] = nullptr;
  } else {
    j["winner"] = nullptr;
    j["baseline"] = nullptr;
    j["error"] = *r.error;
  }
  return j;
}

ExampleRecord example_from_json(const json &j) {
  try {
    ExampleRecord r;
    r.id = j.at("id").get<std::string>();
    r.source = j.at("source").get<std::string>();
    if (const auto &ref = j.at("reference"); !ref.is_null()) r.reference = ref.get<std::string>();
    r.source_style = j.at("source_style").get<std::string>();
    r.target_style = j.at("target_style").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    for (const auto &g : j.at("raw")) r.raw.push_back({g.at("text").get<std::string>(), g.at("gen_score").get<double>()});
    for (const auto &c : j.at("candidates"))
      r.candidates.push_back(Candidate{c.at("text").get<std::string>(), c.at("gen_score").get<double>(),
                                       c.at("unterminated").get<bool>(), c.at("index").get<std::size_t>()});
    r.pool = j.at("pool").get<std::vector<std::size_t>>();
    for (const auto &s : j.at("scores")) r.scores.push_back(rerank_score_from_json(s));
    if (const auto &err = j.at("error"); !err.is_null()) {
      r.error = err.get<std::string>();
    } else {
      r.winner = j.at("winner").get<std::size_t>();
      r.baseline = j.at("baseline").get<std::size_t>();
      if (r.winner >= r.candidates.size() || r.baseline >= r.candidates.size())
        throw DataError("winner or baseline index out of range");
    }
    return r;
  } catch (const json::exception &e) {
    throw DataError(std::string("manifest example: ") + e.what());
  }
}

TransferOutcome transfer_one(const TransferRequest &req, const PipelineConfig &cfg,
                             const Backends &backends, std::string id,
                             std::optional<std::int64_t> seed) {
  validate(cfg);
  if (!backends.generator) throw PreconditionError("transfer needs a completion backend");
  TransferOutcome out;
  ExampleRecord &rec = out.record;
  rec.id = std::move(id);
  rec.source = req.input_text;
  rec.source_style = req.source_style.render();
  rec.target_style = req.target_style.render();
  rec.prompt = render_prompt(req);

  CompletionRequest creq;
  creq.prompt = rec.prompt;
  creq.max_new_tokens = cfg.max_new_tokens;
  creq.num_candidates = cfg.rerank.k;
  creq.stop = req.delimiter.close();
  creq.seed = seed ? seed : cfg.seed;
  creq.decode = cfg.decode;
  rec.raw = complete(*backends.generator, creq).candidates;

  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < rec.raw.size(); ++i) {
    auto ex = extract_completion(rec.raw[i].text, req.delimiter);
    Candidate c{std::move(ex.text), rec.raw[i].gen_score, ex.unterminated, i};
    if (!c.empty_generation()) {
      rec.pool.push_back(i);
      pool.push_back(c);
    }
    rec.candidates.push_back(std::move(c));
  }
  if (pool.empty()) throw PreconditionError("example " + rec.id + ": every candidate was empty after extraction");

  const RerankResult rr = rerank(req, pool, cfg.rerank, backends);
  const std::size_t base = top_beam_baseline(pool);
  rec.scores = rr.scores;
  rec.winner = pool[rr.winner].index;
  rec.baseline = pool[base].index;
  out.winner = pool[rr.winner];
  out.baseline = pool[base];
  return out;
}

std::size_t RunManifest::failures() const noexcept {
  std::size_t n = 0;
  for (const auto &r : records) n += r.ok() ? 0 : 1;
  return n;
}

EvalSummary summarize(const std::vector<ExampleRecord> &records, bool use_baseline,
                      const Backends &backends, int jobs) {
  std::vector<std::string> outputs, sources, ref_outputs, ref_sources, references;
  std::vector<StyleDirection> directions;
  for (const auto &r : records) {
    if (!r.ok()) continue;
    const std::string &out = use_baseline ? r.baseline_text() : r.winner_text();
    outputs.push_back(out);
    sources.push_back(r.source);
    directions.push_back({r.source_style, r.target_style});
    if (r.reference) {
      ref_outputs.push_back(out);
      ref_sources.push_back(r.source);
      references.push_back(*r.reference);
    }
  }
  if (outputs.empty()) throw PreconditionError("no successful examples to summarize");

  EvalSummary s;
  s.s_sbleu = self_sbleu(outputs, sources);
  if (!references.empty()) {
    const EvalSummary with_refs =
        evaluate(EvalInputs{ref_outputs, ref_sources, references, {}, nullptr, nullptr, jobs});
    s.r_sbleu = with_refs.r_sbleu;
    s.gleu = with_refs.gleu;
    s.exact_match = with_refs.exact_match;
  }
  if (backends.classifier) {
    try {
      s.accuracy = classifier_accuracy(outputs, directions, *backends.classifier, jobs);
    } catch (const BackendError &e) {
      // Styles the classifier has no label for: accuracy is undefined.
      if (!is_label_error(e)) throw;
    }
  }
  if (backends.fluency) {
    std::vector<std::string> scorable;
    for (const auto &o : outputs)
      if (!is_blank(o)) scorable.push_back(o);
    if (!scorable.empty()) s.ppl = corpus_perplexity(scorable, *backends.fluency, jobs);
  }
  return s;
}

json config_snapshot(const RequestTemplate &tmpl, const PipelineConfig &cfg) {
  json exemplars = json::object();
  for (const auto &[dir, list] : tmpl.exemplars) {
    json items = json::array();
    for (std::size_t i = 0; i < list.size() && i < static_cast<std::size_t>(tmpl.shots); ++i)
      items.push_back({{"input", list[i].input}, {"output", list[i].output}});
    if (!items.empty()) exemplars[dir.to_string()] = items;
  }
  return {{"template", {{"name", tmpl.prompt_template.name()}, {"pattern", tmpl.prompt_template.pattern()}}},
          {"delimiter",
           {{"name", tmpl.delimiter_name}, {"open", tmpl.delimiter.open()}, {"close", tmpl.delimiter.close()}}},
          {"shots", tmpl.shots},
          {"exemplars", exemplars},
          {"k", cfg.rerank.k},
          {"use_fluency", cfg.rerank.use_fluency},
          {"strength_source", std::string(to_string(cfg.rerank.strength_source))},
          {"max_in_flight", cfg.rerank.max_in_flight},
          {"decode",
           {{"mode", std::string(to_string(cfg.decode.mode))},
            {"beam_width", cfg.decode.beam_width > 0 ? cfg.decode.beam_width : cfg.rerank.k},
            {"temperature", cfg.decode.temperature}}},
          {"max_new_tokens", cfg.max_new_tokens},
          {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
          {"jobs", cfg.jobs},
          {"backends", cfg.backend_info}};
}

RunManifest transfer_corpus(const std::vector<StylePairRecord> &records, const RequestTemplate &tmpl,
                            const PipelineConfig &cfg, const Backends &backends) {
  validate(cfg);
  if (records.empty()) throw PreconditionError("transfer_corpus: no records");
  RunManifest m;
  m.config = config_snapshot(tmpl, cfg);
  m.run_id = run_id_for(m.config, records);
  m.timestamp = utc_timestamp();
  m.records.resize(records.size());
  parallel_for(records.size(), cfg.jobs, [&](std::size_t i) {
    const auto &r = records[i];
    const std::optional<std::int64_t> seed =
        cfg.seed ? std::optional<std::int64_t>(*cfg.seed + static_cast<std::int64_t>(i)) : std::nullopt;
    try {
      m.records[i] = transfer_one(make_request(r, tmpl), cfg, backends, r.id, seed).record;
    } catch (const std::exception &e) {
      ExampleRecord failed;
      failed.id = r.id;
      failed.source = r.source;
      failed.source_style = r.source_style.render();
      failed.target_style = r.target_style.render();
      failed.error = e.what();
      m.records[i] = std::move(failed);
    }
    m.records[i].reference = r.reference;
  });
  if (!m.run_failed()) {
    m.summary = summarize(m.records, false, backends, cfg.jobs);
    m.baseline_summary = summarize(m.records, true, backends, cfg.jobs);
  }
  return m;
}

void write_manifest(std::ostream &out, const RunManifest &m) {
  json header{{"type", "header"},
              {"run_id", m.run_id},
              {"timestamp", m.timestamp},
              {"config", m.config},
              {"summary", m.summary ? to_json(*m.summary) : json(nullptr)},
              {"baseline_summary", m.baseline_summary ? to_json(*m.baseline_summary) : json(nullptr)},
              {"examples", m.records.size()},
              {"failures", m.failures()}};
  out << header.dump() << '\n';
  for (const auto &r : m.records) out << to_json(r).dump() << '\n';
}

void write_manifest(const std::filesystem::path &path, const RunManifest &m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_manifest(out, m);
}

RunManifest read_manifest(std::istream &in) {
  RunManifest m;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw DataError(std::string("manifest: ") + e.what(), line_no);
    }
    const auto type = j.value("type", std::string());
    if (!have_header) {
      if (type != "header") throw DataError("manifest must start with a header object", line_no);
      m.run_id = j.at("run_id").get<std::string>();
      m.timestamp = j.at("timestamp").get<std::string>();
      m.config = j.at("config");
      if (!j.at("summary").is_null()) m.summary = eval_summary_from_json(j.at("summary"));
      if (!j.at("baseline_summary").is_null()) m.baseline_summary = eval_summary_from_json(j.at("baseline_summary"));
      have_header = true;
      continue;
    }
    if (type != "example") throw DataError("expected an example object", line_no);
    m.records.push_back(example_from_json(j));
  }
  if (!have_header) throw DataError("manifest is empty");
  return m;
}

RunManifest read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return read_manifest(in);
}

void validate(const SweepGrid &grid) {
  if (grid.templates.empty() || grid.delimiters.empty() || grid.directions.empty() || grid.shots.empty())
    throw PreconditionError("sweep grid must be non-empty on every axis");
  for (int s : grid.shots)
    if (s < 0) throw PreconditionError("shot counts must be >= 0");
}

std::vector<StyleDirection> directions_of(const std::vector<StylePairRecord> &records) {
  std::vector<StyleDirection> out;
  for (const auto &r : records) {
    StyleDirection d{r.source_style.render(), r.target_style.render()};
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  }
  return out;
}

SweepResult run_sweep(const std::vector<StylePairRecord> &records, const SweepGrid &grid,
                      const PipelineConfig &cfg, const Backends &backends) {
  validate(grid);
  validate(cfg);
  SweepResult result;
  for (const auto &tmpl : grid.templates) {
    for (const auto &delim : grid.delimiters) {
      for (const auto &dir : grid.directions) {
        for (int shots : grid.shots) {
          SweepRow row{tmpl.name(), delim.name, dir.to_string(), shots, std::nullopt, "ok"};
          RunManifest manifest;
          try {
            std::vector<StylePairRecord> subset;
            for (const auto &r : records)
              if (r.source_style.render() == dir.source && r.target_style.render() == dir.target)
                subset.push_back(r);
            if (subset.empty()) throw PreconditionError("no records for " + dir.to_string());
            RequestTemplate rt{tmpl, delim.name, delim.pair, shots, grid.exemplars};
            manifest = transfer_corpus(subset, rt, cfg, backends);
            if (manifest.run_failed())
              row.status = "error: all " + std::to_string(manifest.records.size()) + " examples failed";
            else
              row.summary = manifest.summary;
          } catch (const std::exception &e) {
            row.status = std::string("error: ") + e.what();
          }
          result.rows.push_back(std::move(row));
          result.manifests.push_back(std::move(manifest));
        }
      }
    }
  }
  return result;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = "template,delimiter,direction,shots,accuracy,r_sbleu,s_sbleu,ppl,status\n";
  for (const auto &r : rows) {
    const EvalSummary s = r.summary.value_or(EvalSummary{});
    out += csv_field(r.template_name) + ',' + csv_field(r.delimiter_name) + ',' + csv_field(r.direction) +
           ',' + std::to_string(r.shots) + ',' + csv_number(s.accuracy) + ',' + csv_number(s.r_sbleu) +
           ',' + csv_number(s.s_sbleu) + ',' + csv_number(s.ppl) + ',' + csv_field(r.status) + '\n';
  }
  return out;
}

EvalSummary copy_baseline(const std::vector<StylePairRecord> &records, const Backends &backends, int jobs) {
  if (records.empty()) throw PreconditionError("copy_baseline: no records");
  std::vector<ExampleRecord> copies;
  copies.reserve(records.size());
  for (const auto &r : records) {
    ExampleRecord e;
    e.id = r.id;
    e.source = r.source;
    e.reference = r.reference;
    e.source_style = r.source_style.render();
    e.target_style = r.target_style.render();
    e.candidates.push_back(Candidate{r.source, 0.0, false, 0});
    copies.push_back(std::move(e));
  }
  return summarize(copies, false, backends, jobs);
}

}  // namespace pnr
