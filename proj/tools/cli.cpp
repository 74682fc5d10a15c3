#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wdflow/corpus.hpp"
#include "wdflow/corpus_io.hpp"
#include "wdflow/error.hpp"
#include "wdflow/evaluation.hpp"
#include "wdflow/flowparse.hpp"
#include "wdflow/inference.hpp"
#include "wdflow/manifest.hpp"
#include "wdflow/taskcast.hpp"

namespace wdflow::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxListedDiagnostics = 20;

struct CorpusArgs {
  std::string corpus;
  std::string dataset;
  std::string path;
  std::string split = "test";
  std::string utterances;
  std::string domain;
  bool strict = false;
  bool values = false;
};

void add_corpus_args(CLI::App* cmd, CorpusArgs& a) {
  auto* corpus = cmd->add_option("--corpus", a.corpus, "Normalized corpus JSONL written by `ingest`");
  auto* dataset = cmd->add_option("--dataset", a.dataset, "Raw dataset format")->check(CLI::IsMember({"abcd", "multiwoz"}));
  cmd->add_option("--path", a.path, "Raw dataset file or directory");
  cmd->add_option("--split", a.split, "train, dev or test")->capture_default_str();
  cmd->add_option("--utterances", a.utterances, "ABCD utterance table for integer candidate ids");
  cmd->add_option("--domain-tag", a.domain, "Builtin step domain to attach");
  cmd->add_flag("--strict", a.strict, "Treat repaired annotations and unknown fields as errors");
  cmd->add_flag("--slot-values", a.values, "MultiWOZ: attach slot values to workflow steps");
  corpus->excludes(dataset);
}

Corpus load_corpus(const CorpusArgs& a) {
  const auto split = parse_split(a.split);
  if (!a.corpus.empty()) {
    std::optional<StepDomain> fallback;
    if (!a.domain.empty()) fallback = builtin_domain(a.domain);
    return read_corpus(a.corpus, fallback, split);
  }
  if (a.dataset.empty() || a.path.empty()) throw Error(ErrorCode::kInvalidConfig, "give --corpus, or --dataset with --path");
  CorpusSource src;
  src.dataset = a.dataset;
  src.path = a.path;
  src.split = split;
  src.domain = a.domain;
  src.utterances = a.utterances;
  src.strict = a.strict;
  src.include_values = a.values;
  return load_source(src, {});
}

void report_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& err) {
  for (std::size_t i = 0; i < diags.size() && i < kMaxListedDiagnostics; ++i)
    err << "warning: " << diags[i].record << ": " << diags[i].code << ": " << diags[i].message << "\n";
  if (diags.size() > kMaxListedDiagnostics)
    err << "warning: " << diags.size() - kMaxListedDiagnostics << " more diagnostics not shown\n";
}

bool on_off(const std::string& v) { return v == "on"; }

// Writes to `path`, or to `out` when path is "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path == "-") {
    fn(out);
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream file(p, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path);
  fn(file);
}

ordered_json parsed_json(Task task, const std::string& text) {
  ordered_json j;
  unsigned flags = 0;
  switch (task) {
    case Task::kWD: {
      auto p = parse_wd(text);
      ordered_json steps = ordered_json::array();
      for (const auto& s : p.steps) steps.push_back({{"description", s.description}, {"values", s.values}});
      j["steps"] = std::move(steps);
      flags = p.flags;
      break;
    }
    case Task::kAST: {
      auto p = parse_ast(text);
      j["action"] = p.action;
      j["values"] = p.values;
      flags = p.flags;
      break;
    }
    case Task::kCDS: {
      auto p = parse_cds(text);
      j["intent"] = p.intent;
      j["nextstep"] = p.nextstep;
      j["payload"] = p.payload ? ordered_json(*p.payload) : ordered_json();
      flags = p.flags;
      break;
    }
  }
  return {{"parsed", std::move(j)}, {"flags", parse_flag_names(flags)}};
}

ordered_json metrics_summary(const ordered_json& report) {
  ordered_json s = {{"task", report.at("task")}, {"metrics", report.at("metrics")}};
  if (report.contains("manifest_hash")) s["manifest_hash"] = report["manifest_hash"];
  return s;
}

enum class Context { kLocal, kBackend };

int exit_code_for(ErrorCode code, Context ctx) {
  switch (code) {
    case ErrorCode::kIo:
      return kIoError;
    case ErrorCode::kProviderUnavailable:
    case ErrorCode::kBackendTimeout:
      return kBackendError;
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kMissingPrediction:
    case ErrorCode::kUnknownId:
      return ctx == Context::kBackend ? kBackendError : kValidation;
    default:
      return kValidation;
  }
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow discovery harness: ingest corpora, cast tasks, score predictions, run experiments."};
  app.name("wdflow");
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  // ingest
  CorpusArgs ingest_args;
  std::string ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Load a raw corpus and write normalized JSONL plus a domain file");
  ingest->add_option("--dataset", ingest_args.dataset)->required()->check(CLI::IsMember({"abcd", "multiwoz"}));
  ingest->add_option("--path", ingest_args.path)->required();
  ingest->add_option("--split", ingest_args.split)->capture_default_str();
  ingest->add_option("--out", ingest_out)->required();
  ingest->add_option("--utterances", ingest_args.utterances);
  ingest->add_option("--domain-tag", ingest_args.domain);
  ingest->add_flag("--strict", ingest_args.strict);
  ingest->add_flag("--slot-values", ingest_args.values);

  // cast
  CorpusArgs cast_args;
  std::string cast_task, cast_out = "-", cast_domain = "off", cast_values = "on";
  std::optional<std::uint64_t> cast_seed;
  bool cast_names = false, cast_descriptions = false;
  auto* cast = app.add_subcommand("cast", "Turn a corpus into text-to-text samples (JSONL)");
  cast->add_option("--task", cast_task)->required()->check(CLI::IsMember({"wd", "ast", "cds"}));
  add_corpus_args(cast, cast_args);
  cast->add_option("--out", cast_out, "Output JSONL, '-' for stdout")->capture_default_str();
  cast->add_option("--domain", cast_domain, "Append the step domain to WD inputs")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  auto* names = cast->add_flag("--names", cast_names, "Use step names in Steps and Flow");
  auto* descs = cast->add_flag("--descriptions", cast_descriptions, "Use step descriptions (default)");
  names->excludes(descs);
  cast->add_option("--shuffle-seed", cast_seed, "Shuffle the Steps segment per sample");
  cast->add_option("--values", cast_values, "Include slot values in WD targets")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();

  // eval
  CorpusArgs eval_args;
  std::string eval_task, eval_pred, eval_out, eval_match = "stem", eval_compare = "auto", eval_provider;
  double eval_threshold = 0.95;
  bool eval_names = false, eval_no_per_sample = false;
  auto* eval = app.add_subcommand("eval", "Score a predictions file against gold annotations");
  eval->add_option("--task", eval_task)->required()->check(CLI::IsMember({"wd", "ast", "cds"}));
  eval->add_option("--pred", eval_pred, "JSONL of {\"id\", \"prediction\"}")->required();
  add_corpus_args(eval, eval_args);
  eval->add_option("--out", eval_out, "Directory for report.json and per_sample.jsonl")->required();
  eval->add_option("--match", eval_match)->check(CLI::IsMember({"stem", "sim"}))->capture_default_str();
  eval->add_option("--threshold", eval_threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  eval->add_option("--compare-values", eval_compare, "auto: on for ABCD WD only")
      ->check(CLI::IsMember({"on", "off", "auto"}))
      ->capture_default_str();
  eval->add_option("--provider", eval_provider, "'lexical' or a similarity service URL");
  eval->add_flag("--names", eval_names, "Gold Flow uses step names");
  eval->add_flag("--no-per-sample", eval_no_per_sample);

  // run
  std::string run_manifest_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment manifest end to end");
  run_cmd->add_option("--manifest", run_manifest_path)->required();

  // parse
  std::string parse_task_name, parse_in, parse_out = "-";
  auto* parse = app.add_subcommand("parse", "Parse model outputs (or cast targets) into structures");
  parse->add_option("--task", parse_task_name)->required()->check(CLI::IsMember({"wd", "ast", "cds"}));
  parse->add_option("--in", parse_in, "JSONL with \"prediction\" or \"target\" per line")->required();
  parse->add_option("--out", parse_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  Context ctx = Context::kLocal;
  try {
    if (ingest->parsed()) {
      const auto corpus = load_corpus(ingest_args);
      report_diagnostics(corpus.diagnostics, err);
      write_corpus(corpus, ingest_out);
      out << "ingested " << corpus.dialogues.size() << " dialogues (" << corpus.diagnostics.size()
          << " diagnostics) -> " << ingest_out << "\n";
      return kOk;
    }

    if (cast->parsed()) {
      const auto corpus = load_corpus(cast_args);
      if (corpus.dialogues.empty()) throw Error(ErrorCode::kInvalidConfig, "corpus is empty");
      CastConfig cfg;
      cfg.include_domain = on_off(cast_domain);
      cfg.shuffle_seed = cast_seed;
      cfg.use_names_not_descriptions = cast_names;
      cfg.include_values = on_off(cast_values);
      const auto task = parse_task(cast_task);
      const auto result = cast_corpus(corpus, task, cfg);
      report_diagnostics(result.diagnostics, err);
      if (result.samples.empty())
        throw Error(ErrorCode::kMissingGoldFields, "no " + cast_task + " samples could be cast from this corpus");
      if (cast_out == "-") {
        write_cast_jsonl(result.samples, out);
        err << result.samples.size() << " samples\n";
      } else {
        write_cast_jsonl(result.samples, cast_out);
        out << result.samples.size() << " samples -> " << cast_out << "\n";
      }
      return kOk;
    }

    if (eval->parsed()) {
      const auto corpus = load_corpus(eval_args);
      const auto task = parse_task(eval_task);
      MatchSpec spec;
      spec.mode = eval_match == "sim" ? MatchMode::kSimilarity : MatchMode::kStemExact;
      spec.threshold = eval_threshold;
      if (eval_compare != "auto") spec.compare_values = on_off(eval_compare);
      spec.provider = eval_provider;
      const auto match = make_match_config(spec, task, corpus.domain.dataset_tag());

      std::vector<Diagnostic> diags;
      const auto predictions = read_predictions_jsonl(eval_pred, &diags);
      report_diagnostics(diags, err);
      RunMetadata meta;
      meta.domain_tag = corpus.domain.dataset_tag();
      meta.use_names = eval_names;
      const auto report = evaluate(build_gold(corpus, task, eval_names), predictions, match, meta);
      write_report(report, eval_out, !eval_no_per_sample);
      out << metrics_summary(report_json(report)).dump(2) << "\n";
      if (report.id_mismatch()) {
        err << "error: IdMismatch: " << report.missing_ids.size() << " gold ids without prediction, "
            << report.unexpected_ids.size() << " predictions without gold\n";
        return kValidation;
      }
      return kOk;
    }

    if (run_cmd->parsed()) {
      const auto manifest = load_manifest(run_manifest_path);
      ctx = Context::kBackend;
      const auto result = run_manifest(manifest);
      out << "run directory: " << result.run_dir.string() << "\n";
      if (result.skipped) {
        out << "report.json already present; nothing to do\n";
        return kOk;
      }
      out << metrics_summary(result.report).dump(2) << "\n";
      if (result.evaluation && result.evaluation->id_mismatch()) return kValidation;
      return kOk;
    }

    if (parse->parsed()) {
      const auto task = parse_task(parse_task_name);
      std::ifstream in(parse_in);
      if (!in) throw Error(ErrorCode::kIo, "cannot open " + parse_in);
      with_output(parse_out, out, [&](std::ostream& os) {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
          ++lineno;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          nlohmann::json j;
          try {
            j = nlohmann::json::parse(line);
          } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::kMalformedResponse, parse_in + ":" + std::to_string(lineno) + ": " + e.what());
          }
          const char* key = j.contains("prediction") ? "prediction" : "target";
          if (!j.is_object() || !j.contains(key) || !j[key].is_string())
            throw Error(ErrorCode::kMalformedResponse,
                        parse_in + ":" + std::to_string(lineno) + ": expected a \"prediction\" or \"target\" string");
          ordered_json row;
          row["id"] = j.value("id", "");
          row["task"] = parse_task_name;
          auto parsed = parsed_json(task, j[key].get<std::string>());
          row["parsed"] = std::move(parsed["parsed"]);
          row["flags"] = std::move(parsed["flags"]);
          os << row.dump() << "\n";
        }
      });
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code(), ctx);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}

}  // namespace wdflow::cli
