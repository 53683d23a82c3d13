// Copyright 2026 The pnr Authors
// SPDX-License-Identifier: Apache-2.0

// pnr: prompt-and-rerank style transfer from the command line.
//
//   pnr transfer --text "good food" --from positive --to negative
//   pnr transfer --data yelp.jsonl --out runs/yelp
//   pnr sweep --data toy.jsonl --out sweep.csv
//   pnr symb --n 1000 --seed 7 --out symb.jsonl
//   pnr clean --in raw.txt --out clean.txt
//   pnr eval --hyp h.txt --ref r.txt
//   pnr serve-mock --port 8080
//
// Exit status: 0 on success, 2 for configuration errors, 1 for backend
// failures or a run in which every example failed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnr/datasets.hpp"
#include "pnr/error.hpp"
#include "pnr/http.hpp"
#include "pnr/mock_backends.hpp"
#include "pnr/pipeline.hpp"
#include "pnr/text.hpp"

namespace fs = std::filesystem;
using namespace pnr;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBackend = 1;
constexpr int kExitConfig = 2;

constexpr const char *kDelimiterHelp =
    "Delimiter short names: curly {x}, square [x], angle <x>, paren (x), quote \"x\", "
    "dash --x--, triple-angle <<<x>>>, blockquote > \"x\", bullet * \"x\", liquid {{x}}";

struct BackendOptions {
  std::string kind;
  BackendEndpoints endpoints = BackendEndpoints::from_env();
};

struct RunOptions {
  std::string template_name = "contrastive";
  std::string delimiter_name = "curly";
  std::string prompt_config;
  int shots = 0;
  std::string exemplars_path;
  int k = 3;
  bool no_fluency = false;
  std::string strength = "mlm";
  std::string decode = "beam";
  int beam_width = 0;
  double temperature = 1.0;
  int max_new_tokens = 64;
  std::optional<std::int64_t> seed;
  int jobs = 4;
};

struct DataOptions {
  std::string path;
  std::string format;
  bool strict = false;
  bool clean = false;
};

void add_backend_flags(CLI::App *cmd, BackendOptions &b) {
  const char *env = std::getenv("PNR_BACKEND");
  b.kind = env && *env ? env : "http";
  cmd->add_option("--backend", b.kind, "mock (in-process) or http (PNR_*_URL endpoints)")
      ->check(CLI::IsMember({"mock", "http"}));
  cmd->add_option("--complete-url", b.endpoints.complete_url, "Completion service URL");
  cmd->add_option("--score-url", b.endpoints.score_url, "Token scoring service URL");
  cmd->add_option("--fill-mask-url", b.endpoints.fill_mask_url, "Mask-fill service URL");
  cmd->add_option("--embed-url", b.endpoints.embed_url, "Embedding service URL");
  cmd->add_option("--classifier-url", b.endpoints.classifier_url, "Style classifier service URL");
  cmd->add_option("--mask-token", b.endpoints.mask_token, "Mask token of the fill-mask service");
}

void add_run_flags(CLI::App *cmd, RunOptions &r) {
  cmd->add_option("--template", r.template_name,
                  "vanilla, contrastive, negation-v1, negation-v2 or a name from --prompt-config");
  cmd->add_option("--delimiter", r.delimiter_name, kDelimiterHelp);
  cmd->add_option("--prompt-config", r.prompt_config, "JSON file with extra templates/delimiters");
  cmd->add_option("--shots", r.shots, "Exemplars prepended to each prompt")->check(CLI::NonNegativeNumber);
  cmd->add_option("--exemplars", r.exemplars_path, "Dataset whose referenced rows serve as exemplars");
  cmd->add_option("--k", r.k, "Candidates per example (>= 1)");
  cmd->add_flag("--no-fluency", r.no_fluency, "Drop the fluency factor from the rerank score");
  cmd->add_option("--strength", r.strength, "Strength factor source: mlm (cloze) or classifier")
      ->check(CLI::IsMember({"mlm", "classifier"}));
  cmd->add_option("--decode", r.decode, "beam or sample")->check(CLI::IsMember({"beam", "sample"}));
  cmd->add_option("--beam-width", r.beam_width, "Beam width (default: k)");
  cmd->add_option("--temperature", r.temperature, "Sampling temperature");
  cmd->add_option("--max-new-tokens", r.max_new_tokens, "Generation budget per candidate");
  cmd->add_option("--seed", r.seed, "Base seed; example i uses seed + i");
  cmd->add_option("--jobs", r.jobs, "Examples processed concurrently");
}

void add_data_flags(CLI::App *cmd, DataOptions &d) {
  cmd->add_option("--format", d.format, "jsonl or tsv (default: by extension)")
      ->check(CLI::IsMember({"jsonl", "tsv"}));
  cmd->add_flag("--strict", d.strict, "Fail on the first malformed row");
  cmd->add_flag("--clean", d.clean, "Apply text cleaning to sources and references");
}

Backends make_backends(const BackendOptions &b, json &info) {
  if (b.kind == "mock") {
    info = "mock";
    return mock::standard_backends();
  }
  info = {{"complete", b.endpoints.complete_url},   {"score", b.endpoints.score_url},
          {"fill_mask", b.endpoints.fill_mask_url}, {"embed", b.endpoints.embed_url},
          {"classifier", b.endpoints.classifier_url}};
  return connect(b.endpoints);
}

PipelineConfig make_pipeline_config(const RunOptions &r) {
  if (r.k < 1) throw PreconditionError("--k must be >= 1");
  if (r.jobs < 1) throw PreconditionError("--jobs must be >= 1");
  PipelineConfig cfg;
  cfg.rerank.k = r.k;
  cfg.rerank.use_fluency = !r.no_fluency;
  cfg.rerank.strength_source =
      r.strength == "mlm" ? StrengthSource::kMlmCloze : StrengthSource::kExternalClassifier;
  cfg.decode.mode = *parse_decode_mode(r.decode);
  cfg.decode.beam_width = r.beam_width;
  cfg.decode.temperature = r.temperature;
  cfg.max_new_tokens = r.max_new_tokens;
  cfg.seed = r.seed;
  cfg.jobs = r.jobs;
  validate(cfg);
  return cfg;
}

void require_services(const Backends &b, const PipelineConfig &cfg) {
  if (!b.generator) throw PreconditionError("no completion service: set PNR_COMPLETE_URL or --complete-url");
  if (!b.embedder) throw PreconditionError("no embedding service: set PNR_EMBED_URL or --embed-url");
  if (cfg.rerank.strength_source == StrengthSource::kMlmCloze && !b.mlm)
    throw PreconditionError("no mask-fill service: set PNR_FILL_MASK_URL or --fill-mask-url");
  if (cfg.rerank.strength_source == StrengthSource::kExternalClassifier && !b.classifier)
    throw PreconditionError("no classifier service: set PNR_CLASSIFIER_URL or --classifier-url");
  if (cfg.rerank.use_fluency && !b.fluency)
    throw PreconditionError("no scoring service: set PNR_SCORE_URL or --score-url, or pass --no-fluency");
}

PromptCatalog load_catalog(const RunOptions &r) {
  return r.prompt_config.empty() ? PromptCatalog() : PromptCatalog::from_file(r.prompt_config);
}

LoadResult load(const DataOptions &d, const std::string &path) {
  DatasetFormat fmt = d.format.empty() ? format_for_path(path) : *parse_dataset_format(d.format);
  LoadOptions opts;
  opts.strict = d.strict;
  opts.clean = d.clean;
  LoadResult res = load_dataset(path, fmt, opts);
  for (const auto &w : res.warnings) std::cerr << "warning: " << w.message << " (row skipped)\n";
  return res;
}

RequestTemplate make_request_template(const RunOptions &r, const DataOptions &d) {
  const PromptCatalog catalog = load_catalog(r);
  auto tmpl = catalog.find_template(r.template_name);
  if (!tmpl) throw PreconditionError("unknown template '" + r.template_name + "'");
  auto delim = catalog.find_delimiter(r.delimiter_name);
  if (!delim) throw PreconditionError("unknown delimiter '" + r.delimiter_name + "'. " + kDelimiterHelp);
  RequestTemplate rt{*tmpl, r.delimiter_name, *delim, r.shots, {}};
  if (r.shots > 0) {
    if (r.exemplars_path.empty()) throw PreconditionError("--shots > 0 needs --exemplars");
    rt.exemplars = exemplars_from_records(load(d, r.exemplars_path).records);
  }
  return rt;
}

std::string fmt(const std::optional<double> &v, int precision = 2) {
  if (!v) return "n/a";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << *v;
  return os.str();
}

void print_summary(std::ostream &out, const char *title, const EvalSummary &s) {
  out << title << '\n'
      << "  r-sBLEU:     " << fmt(s.r_sbleu) << '\n'
      << "  s-sBLEU:     " << fmt(s.s_sbleu) << '\n'
      << "  accuracy:    " << fmt(s.accuracy, 4) << '\n'
      << "  PPL:         " << fmt(s.ppl) << '\n'
      << "  GLEU:        " << fmt(s.gleu, 4) << '\n'
      << "  exact match: " << fmt(s.exact_match, 4) << '\n';
}

std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!is_blank(item)) out.emplace_back(trim(item));
  return out;
}

// ---- transfer ---------------------------------------------------------------

struct TransferArgs {
  std::string text, from, to, reference, out_dir;
  bool json_out = false;
  RunOptions run;
  DataOptions data;
  BackendOptions backend;
};

int cmd_transfer(TransferArgs &a, CLI::App *cmd) {
  if (a.text.empty() == a.data.path.empty())
    throw PreconditionError("give exactly one of --text or --data");
  const PipelineConfig base_cfg = make_pipeline_config(a.run);
  const RequestTemplate rt = make_request_template(a.run, a.data);

  std::vector<StylePairRecord> records;
  if (!a.text.empty()) {
    if (a.from.empty() || a.to.empty()) {
      std::cerr << "--text needs both --from and --to\n\n" << cmd->help();
      return kExitConfig;
    }
    std::optional<std::string> ref;
    if (!a.reference.empty()) ref = a.reference;
    records.push_back({"input", a.text, ref, StyleLabel(a.from), StyleLabel(a.to)});
    validate(make_request(records.front(), rt));
  } else {
    records = load(a.data, a.data.path).records;
    if (records.empty()) throw DataError("dataset " + a.data.path + " has no usable rows");
  }

  PipelineConfig cfg = base_cfg;
  const Backends backends = make_backends(a.backend, cfg.backend_info);
  require_services(backends, cfg);
  const RunManifest m = transfer_corpus(records, rt, cfg, backends);

  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_manifest(fs::path(a.out_dir) / "manifest.jsonl", m);
  }
  if (a.json_out) {
    json out{{"run_id", m.run_id},
             {"summary", m.summary ? to_json(*m.summary) : json(nullptr)},
             {"baseline_summary", m.baseline_summary ? to_json(*m.baseline_summary) : json(nullptr)},
             {"examples", json::array()}};
    for (const auto &r : m.records)
      out["examples"].push_back({{"id", r.id},
                                 {"winner", r.ok() ? json(r.winner_text()) : json(nullptr)},
                                 {"baseline", r.ok() ? json(r.baseline_text()) : json(nullptr)},
                                 {"error", r.error ? json(*r.error) : json(nullptr)}});
    std::cout << out.dump(2) << '\n';
  } else if (!a.text.empty()) {
    const auto &r = m.records.front();
    if (r.ok()) std::cout << r.winner_text() << '\n';
  } else {
    for (const auto &r : m.records) {
      if (r.ok())
        std::cout << r.id << '\t' << r.winner_text() << '\n';
      else
        std::cout << r.id << "\tERROR: " << *r.error << '\n';
    }
    if (m.summary) print_summary(std::cout, "rerank:", *m.summary);
    if (m.baseline_summary) print_summary(std::cout, "top-beam baseline:", *m.baseline_summary);
  }
  for (const auto &r : m.records)
    if (!r.ok()) std::cerr << "example " << r.id << " failed: " << *r.error << '\n';
  return m.run_failed() ? kExitBackend : kExitOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string templates, delimiters, shots = "0", out, manifests_dir;
  RunOptions run;
  DataOptions data;
  BackendOptions backend;
};

int cmd_sweep(SweepArgs &a) {
  PipelineConfig cfg = make_pipeline_config(a.run);
  const PromptCatalog catalog = load_catalog(a.run);
  const auto records = load(a.data, a.data.path).records;
  if (records.empty()) throw DataError("dataset " + a.data.path + " has no usable rows");

  SweepGrid grid;
  if (a.templates.empty()) {
    grid.templates = catalog.templates();
  } else {
    for (const auto &name : split_list(a.templates)) {
      auto t = catalog.find_template(name);
      if (!t) throw PreconditionError("unknown template '" + name + "'");
      grid.templates.push_back(*t);
    }
  }
  if (a.delimiters.empty()) {
    grid.delimiters = catalog.delimiters();
  } else {
    for (const auto &name : split_list(a.delimiters)) {
      auto d = catalog.find_delimiter(name);
      if (!d) throw PreconditionError("unknown delimiter '" + name + "'. " + kDelimiterHelp);
      grid.delimiters.push_back({name, *d});
    }
  }
  grid.shots.clear();
  for (const auto &s : split_list(a.shots)) {
    try {
      grid.shots.push_back(std::stoi(s));
    } catch (const std::exception &) {
      throw PreconditionError("bad shot count '" + s + "'");
    }
  }
  grid.directions = directions_of(records);
  if (!a.run.exemplars_path.empty())
    grid.exemplars = exemplars_from_records(load(a.data, a.run.exemplars_path).records);
  validate(grid);

  const Backends backends = make_backends(a.backend, cfg.backend_info);
  require_services(backends, cfg);
  const SweepResult result = run_sweep(records, grid, cfg, backends);
  const std::string csv = sweep_csv(result.rows);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw DataError("cannot write " + a.out);
    out << csv;
  }
  if (!a.manifests_dir.empty()) {
    fs::create_directories(a.manifests_dir);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      if (result.manifests[i].records.empty()) continue;
      const auto &row = result.rows[i];
      std::string name = row.template_name + "_" + row.delimiter_name + "_" + row.direction + "_" +
                         std::to_string(row.shots) + "shot.jsonl";
      for (char &c : name)
        if (c == '>' || c == '/' || c == ' ') c = '_';
      write_manifest(fs::path(a.manifests_dir) / name, result.manifests[i]);
    }
  }
  std::size_t failed = 0;
  for (const auto &row : result.rows) failed += row.status == "ok" ? 0 : 1;
  if (failed) std::cerr << failed << " of " << result.rows.size() << " sweep cells failed\n";
  return failed == result.rows.size() ? kExitBackend : kExitOk;
}

// ---- symb / clean -------------------------------------------------------------

struct SymbArgs {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out, format;
};

int cmd_symb(SymbArgs &a) {
  SymbSpec spec{default_symb_categories(), a.n, a.seed};
  const auto records = generate_symb(spec);
  const DatasetFormat fmt = !a.format.empty() ? *parse_dataset_format(a.format)
                            : a.out.empty()   ? DatasetFormat::kJsonl
                                              : format_for_path(a.out);
  if (a.out.empty()) {
    write_dataset(std::cout, records, fmt);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw DataError("cannot write " + a.out);
    write_dataset(out, records, fmt);
  }
  return kExitOk;
}

struct CleanArgs {
  std::string in, out;
};

int cmd_clean(CleanArgs &a) {
  std::ifstream fin;
  std::ofstream fout;
  if (!a.in.empty()) {
    fin.open(a.in);
    if (!fin) throw DataError("cannot read " + a.in);
  }
  if (!a.out.empty()) {
    fout.open(a.out, std::ios::binary);
    if (!fout) throw DataError("cannot write " + a.out);
  }
  std::istream &in = a.in.empty() ? std::cin : fin;
  std::ostream &out = a.out.empty() ? std::cout : fout;
  for (std::string line; std::getline(in, line);) out << clean_text(line) << '\n';
  return kExitOk;
}

// ---- eval ---------------------------------------------------------------------

struct EvalArgs {
  std::string manifest, hyp, src, ref, from, to;
  bool json_out = false;
  bool no_models = false;
  BackendOptions backend;
};

int cmd_eval(EvalArgs &a) {
  if (a.manifest.empty() == a.hyp.empty()) throw PreconditionError("give exactly one of --manifest or --hyp");
  Backends backends;
  json info;
  if (!a.no_models) backends = make_backends(a.backend, info);
  if (!a.manifest.empty()) {
    const RunManifest m = read_manifest(a.manifest);
    if (m.run_failed()) throw DataError("manifest has no successful examples");
    const int jobs = m.config.value("jobs", 4);
    const EvalSummary s = summarize(m.records, false, backends, jobs);
    const EvalSummary b = summarize(m.records, true, backends, jobs);
    const bool matches = m.summary && *m.summary == s && m.baseline_summary && *m.baseline_summary == b;
    if (a.json_out) {
      std::cout << json{{"summary", to_json(s)},
                        {"baseline_summary", to_json(b)},
                        {"matches_stored", matches}}
                       .dump(2)
                << '\n';
    } else {
      print_summary(std::cout, "rerank:", s);
      print_summary(std::cout, "top-beam baseline:", b);
      std::cout << "matches stored summary: " << (matches ? "yes" : "no") << '\n';
    }
    return kExitOk;
  }

  const auto hyps = read_lines(a.hyp);
  std::vector<std::string> srcs, refs;
  if (!a.src.empty()) srcs = read_lines(a.src);
  if (!a.ref.empty()) refs = read_lines(a.ref);
  if ((!srcs.empty() && srcs.size() != hyps.size()) || (!refs.empty() && refs.size() != hyps.size()))
    throw PreconditionError("--hyp, --src and --ref must have the same number of lines");
  std::vector<StyleDirection> dirs;
  if (!a.from.empty() && !a.to.empty()) dirs.assign(hyps.size(), StyleDirection{a.from, a.to});
  EvalInputs in{hyps, srcs, refs, dirs, backends.classifier.get(), backends.fluency.get(), 4};
  const EvalSummary s = evaluate(in);
  if (a.json_out)
    std::cout << to_json(s).dump(2) << '\n';
  else
    print_summary(std::cout, "evaluation:", s);
  return kExitOk;
}

// ---- serve-mock ---------------------------------------------------------------

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
};

int cmd_serve(ServeArgs &a) {
  ServiceHost host(mock::standard_backends());
  std::cerr << "serving mock backends on http://" << a.host << ':' << a.port
            << " (classifier under /classifier)\n";
  host.listen(a.host, a.port);
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Prompt-and-rerank text style transfer"};
  app.require_subcommand(1);

  TransferArgs transfer;
  auto *t = app.add_subcommand("transfer", "Rewrite one text or a dataset into a target style");
  t->add_option("--text", transfer.text, "Single input text");
  t->add_option("--from", transfer.from, "Source style (with --text)");
  t->add_option("--to", transfer.to, "Target style (with --text)");
  t->add_option("--reference", transfer.reference, "Reference rewrite (with --text)");
  t->add_option("--data", transfer.data.path, "Dataset file (JSONL or TSV)");
  t->add_option("--out", transfer.out_dir, "Directory for manifest.jsonl");
  t->add_flag("--json", transfer.json_out, "Machine-readable output");
  add_run_flags(t, transfer.run);
  add_data_flags(t, transfer.data);
  add_backend_flags(t, transfer.backend);

  SweepArgs sweep;
  auto *s = app.add_subcommand("sweep", "Evaluate a grid of templates x delimiters x shots");
  s->add_option("--data", sweep.data.path, "Dataset file (JSONL or TSV)")->required();
  s->add_option("--templates", sweep.templates, "Comma-separated template names (default: all)");
  s->add_option("--delimiters", sweep.delimiters, "Comma-separated delimiter names (default: all)");
  s->add_option("--shot-counts", sweep.shots, "Comma-separated shot counts (default: 0)");
  s->add_option("--out", sweep.out, "CSV output path (default: stdout)");
  s->add_option("--manifests", sweep.manifests_dir, "Directory for per-cell manifests");
  add_run_flags(s, sweep.run);
  add_data_flags(s, sweep.data);
  add_backend_flags(s, sweep.backend);

  SymbArgs symb;
  auto *y = app.add_subcommand("symb", "Generate the symbolic comparison dataset");
  y->add_option("--n", symb.n, "Number of records")->check(CLI::PositiveNumber);
  y->add_option("--seed", symb.seed, "Random seed");
  y->add_option("--out", symb.out, "Output path (default: stdout)");
  y->add_option("--format", symb.format, "jsonl or tsv")->check(CLI::IsMember({"jsonl", "tsv"}));

  CleanArgs clean;
  auto *c = app.add_subcommand("clean", "Clean text line by line");
  c->add_option("--in", clean.in, "Input file (default: stdin)");
  c->add_option("--out", clean.out, "Output file (default: stdout)");

  EvalArgs eval;
  auto *e = app.add_subcommand("eval", "Compute metrics from a manifest or from text files");
  e->add_option("--manifest", eval.manifest, "Run manifest to re-evaluate");
  e->add_option("--hyp", eval.hyp, "System outputs, one per line");
  e->add_option("--src", eval.src, "Sources, one per line (s-sBLEU, GLEU)");
  e->add_option("--ref", eval.ref, "References, one per line (r-sBLEU, GLEU, exact match)");
  e->add_option("--from", eval.from, "Source style for accuracy");
  e->add_option("--to", eval.to, "Target style for accuracy");
  e->add_flag("--no-models", eval.no_models, "Skip classifier accuracy and perplexity");
  e->add_flag("--json", eval.json_out, "Machine-readable output");
  add_backend_flags(e, eval.backend);

  ServeArgs serve;
  auto *m = app.add_subcommand("serve-mock", "Serve the deterministic mock backends over HTTP");
  m->add_option("--host", serve.host, "Bind address");
  m->add_option("--port", serve.port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp &err) {
    return app.exit(err);
  } catch (const CLI::ParseError &err) {
    app.exit(err);
    return kExitConfig;
  }

  try {
    if (*t) return cmd_transfer(transfer, t);
    if (*s) return cmd_sweep(sweep);
    if (*y) return cmd_symb(symb);
    if (*c) return cmd_clean(clean);
    if (*e) return cmd_eval(eval);
    if (*m) return cmd_serve(serve);
  } catch (const BackendError &err) {
    std::cerr << "backend error: " << err.what() << " (after " << err.attempts() << " attempt(s))\n";
    return kExitBackend;
  } catch (const PreconditionError &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const DataError &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const ParseError &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitBackend;
  }
  return kExitConfig;
}
