#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wdflow/corpus.hpp"

namespace wdflow {

enum class Task { kWD, kAST, kCDS };

std::string_view to_string(Task t);  // "wd" | "ast" | "cds"
Task parse_task(std::string_view s);  // throws Error(kInvalidConfig)

struct CastSample {
  std::string id;
  Task task = Task::kWD;
  std::string input_text;
  std::string target_text;

  bool operator==(const CastSample&) const = default;
};

struct CastPrefixes {
  std::string wd_source = "Extract workflow: ";
  std::string ast_source = "Extract AST: ";
  std::string cds_source = "Extract CDS: ";
  std::string wd_target = "Flow: ";
  std::string ast_target = "AST: ";
  std::string cds_target = "CDS: ";
};

struct CastConfig {
  bool include_domain = false;
  // Per-sample shuffling of the Steps segment is on iff a seed is given.
  std::optional<std::uint64_t> shuffle_seed;
  // Ablation: step names instead of descriptions, in both Steps and Flow.
  bool use_names_not_descriptions = false;
  bool include_values = true;
  CastPrefixes prefixes;
};

// Label of a workflow step as it appears in WD text.
const std::string& step_label(const WorkflowStep& step, bool use_names);

// WD samples exclude action-turn utterances from the dialogue text.
CastSample cast_wd(const Dialogue& dialogue, const StepDomain* domain, const CastConfig& cfg);
CastSample cast_ast(const Dialogue& dialogue, const GoldTurn& turn, const CastConfig& cfg = {});
CastSample cast_cds(const Dialogue& dialogue, const GoldTurn& turn, const CastConfig& cfg = {});

std::string turn_sample_id(const Dialogue& dialogue, const GoldTurn& turn);

// Deterministic permutation of [0, n) drawn from (seed, sample id).
std::vector<std::size_t> domain_permutation(std::size_t n, std::uint64_t seed, std::string_view sample_id);

// Places where a delimiter inside a value or description would make the
// target text ambiguous to parse back.
std::vector<std::string> grammar_conflicts(const Dialogue& dialogue, Task task, const CastConfig& cfg);

struct CastOutput {
  std::vector<CastSample> samples;
  std::vector<Diagnostic> diagnostics;
};

// One WD sample per dialogue, or one AST/CDS sample per qualifying turn, in
// (dialogue, turn) order. Per-sample failures become diagnostics.
CastOutput cast_corpus(const Corpus& corpus, Task task, const CastConfig& cfg);

nlohmann::json to_json(const CastSample& s);
CastSample cast_sample_from_json(const nlohmann::json& j);
// Keys in order: id, task, input, target.
void write_cast_jsonl(const std::vector<CastSample>& samples, std::ostream& out);
void write_cast_jsonl(const std::vector<CastSample>& samples, const std::filesystem::path& path);
std::vector<CastSample> read_cast_jsonl(const std::filesystem::path& path);

}  // namespace wdflow
