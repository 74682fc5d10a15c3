#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wdflow/corpus.hpp"
#include "wdflow/metrics.hpp"
#include "wdflow/taskcast.hpp"

namespace wdflow {

struct Prediction {
  std::string id;
  std::string text;
};

// Gold structures for every sample cast_corpus would emit, in the same order.
struct GoldSet {
  Task task = Task::kWD;
  std::vector<std::string> ids;
  std::vector<std::vector<ParsedStep>> workflows;  // WD
  std::vector<GoldAction> actions;                 // AST
  std::vector<CDSGold> turns;                      // CDS
};

GoldSet build_gold(const Corpus& corpus, Task task, bool use_names = false);

struct RunMetadata {
  std::string domain_tag;
  bool include_domain = false;
  bool use_names = false;
  bool include_values = true;
  std::optional<std::uint64_t> shuffle_seed;
  std::optional<std::uint64_t> sample_seed;
  std::string manifest_hash;
  nlohmann::json extra = nlohmann::json::object();
};

struct EvalReport {
  Task task = Task::kWD;
  std::optional<WDScore> wd;
  std::optional<ASTScore> ast;
  std::optional<CDSScore> cds;
  MatchMode match_mode = MatchMode::kStemExact;
  double threshold = 0.95;
  bool compare_values = false;
  std::string provider;
  RunMetadata meta;
  std::vector<std::string> missing_ids;     // gold ids without a prediction (scored as empty output)
  std::vector<std::string> unexpected_ids;  // prediction ids absent from gold (ignored)
  std::map<std::string, std::size_t> parse_flags;
  std::vector<nlohmann::ordered_json> per_sample;

  bool id_mismatch() const { return !missing_ids.empty() || !unexpected_ids.empty(); }
};

EvalReport evaluate(const GoldSet& gold, const std::vector<Prediction>& predictions, const MatchConfig& match,
                    const RunMetadata& meta = {});

// Metric values are rounded to 4 decimals; no timestamps, so re-evaluating
// the same predictions is byte-identical.
nlohmann::ordered_json report_json(const EvalReport& report);

// Writes <dir>/report.json and, when requested, <dir>/per_sample.jsonl.
void write_report(const EvalReport& report, const std::filesystem::path& dir, bool per_sample = true);

std::string library_version();

}  // namespace wdflow
