#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wdflow/corpus.hpp"
#include "wdflow/experiments.hpp"
#include "wdflow/inference.hpp"
#include "wdflow/taskcast.hpp"

namespace wdflow {

struct CorpusSource {
  std::string dataset;  // "abcd" | "multiwoz" | "jsonl"
  std::string path;     // relative paths resolve against the manifest directory
  Split split = Split::kTest;
  std::string domain;   // builtin tag; empty picks the dataset default
  std::string utterances;
  bool strict = false;
  bool include_values = false;  // MultiWOZ slot values
};

struct BackendSpec {
  std::string kind = "oracle";  // "oracle" | "replay" | "http"
  std::string endpoint;
  std::string replay_path;
  HttpLimits limits;
  int max_new_units = 256;
};

struct MatchSpec {
  MatchMode mode = MatchMode::kStemExact;
  double threshold = 0.95;
  std::optional<bool> compare_values;  // unset: on for ABCD WD only
  std::string provider;                // "lexical" or an http endpoint
};

struct RunManifest {
  Task task = Task::kWD;
  std::optional<CorpusSource> train;
  CorpusSource eval;
  SplitSpec split = InDistribution{};
  CastConfig cast;
  BackendSpec backend;
  MatchSpec match;
  std::string output_root = "runs";
  std::string version;
  std::filesystem::path base_dir;  // not part of the hash
};

RunManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunManifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const RunManifest& m);

// FNV-1a 64 over the canonical (sorted-key) dump, as 16 hex digits.
std::string manifest_hash(const RunManifest& m);
std::filesystem::path run_directory(const RunManifest& m);

std::filesystem::path resolve_path(const RunManifest& m, const std::string& p);
Corpus load_source(const CorpusSource& src, const std::filesystem::path& base_dir);
MatchConfig make_match_config(const MatchSpec& spec, Task task, const std::string& eval_domain_tag);
std::unique_ptr<GenerationBackend> make_backend(const RunManifest& m, const std::vector<CastSample>& eval_samples);

// Loads corpora, applies the split, runs, and writes under run_directory(m).
ExperimentResult run_manifest(const RunManifest& m);

}  // namespace wdflow
