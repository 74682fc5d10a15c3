#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wdflow {

enum class Speaker { kCustomer, kAgent, kAction, kSystem };

std::string_view to_string(Speaker s);
std::optional<Speaker> parse_speaker(std::string_view s);

struct Utterance {
  Speaker speaker = Speaker::kCustomer;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

enum class NextStep { kRetrieveUtterance, kTakeAction, kEndConversation };

std::string_view to_string(NextStep s);
std::optional<NextStep> parse_next_step(std::string_view s);

// Gold annotation attached to the utterance at `turn_index`. The model input
// for this turn is everything strictly before it.
struct GoldTurn {
  std::size_t turn_index = 0;
  std::optional<std::string> intent;
  std::optional<NextStep> nextstep;
  std::optional<std::string> action_name;  // present iff nextstep == kTakeAction
  std::vector<std::string> action_values;
  std::vector<std::string> candidate_utterances;  // non-empty iff kRetrieveUtterance
  std::optional<std::string> gold_utterance;

  bool operator==(const GoldTurn&) const = default;
};

struct WorkflowStep {
  std::string name;
  std::string description;
  std::vector<std::string> values;

  bool operator==(const WorkflowStep&) const = default;
};

// Steps in order of occurrence; duplicates are meaningful.
struct Workflow {
  std::vector<WorkflowStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  bool contains(std::string_view step_name) const;
  bool operator==(const Workflow&) const = default;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
  std::vector<GoldTurn> gold_turns;
  std::optional<Workflow> gold_workflow;

  bool operator==(const Dialogue&) const = default;
};

// Reserved padding step used when aligning short predictions. No domain may
// contain a description that normalizes to it.
inline constexpr std::string_view kMissingStep = "Missing";

struct DomainEntry {
  std::string name;
  std::string description;

  bool operator==(const DomainEntry&) const = default;
};

class StepDomain {
 public:
  StepDomain() = default;
  // Throws Error(kInvalidDomain) on duplicate names/descriptions or a
  // description equal to the sentinel after normalization.
  StepDomain(std::string dataset_tag, std::vector<DomainEntry> entries);

  const std::string& dataset_tag() const { return dataset_tag_; }
  const std::vector<DomainEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const DomainEntry* find_by_name(std::string_view name) const;
  bool contains(std::string_view name) const { return find_by_name(name) != nullptr; }

  bool operator==(const StepDomain&) const = default;

 private:
  std::string dataset_tag_;
  std::vector<DomainEntry> entries_;
};

// "abcd" (30 steps), "multiwoz_original" and "multiwoz_modified" (12 each).
StepDomain builtin_domain(std::string_view tag);
std::vector<std::string> builtin_domain_tags();

enum class Split { kTrain, kDev, kTest };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);  // throws Error(kUnknownSplit)

// Non-fatal finding recorded while loading or casting. `record` locates the
// offending item, e.g. "train[3].turns[5]" or a dialogue id.
struct Diagnostic {
  std::string record;
  std::string code;
  std::string message;
  bool strict_violation = false;

  bool operator==(const Diagnostic&) const = default;
};

struct Corpus {
  std::vector<Dialogue> dialogues;
  StepDomain domain;
  Split split = Split::kTest;
  std::vector<Diagnostic> diagnostics;

  bool operator==(const Corpus&) const = default;
};

struct LoadOptions {
  // Unknown fields and repaired annotations become fatal.
  bool strict = false;
  // ABCD: resolves integer candidate ids. Defaults to utterances.json next to
  // the corpus file when that exists.
  std::optional<std::filesystem::path> utterances_path;
  // MultiWOZ: attach slot values to workflow steps.
  bool include_values = false;
  // MultiWOZ: which description table to attach.
  std::string multiwoz_domain = "multiwoz_modified";
};

// ABCD-style JSON: {"train": [...], "dev": [...], "test": [...]}.
Corpus load_abcd(const std::filesystem::path& path, Split split, const LoadOptions& opts = {});

// MultiWOZ-2.2-style data: either a directory holding <split>/*.json, a
// directory of *.json files, or a single JSON file with a list of dialogues.
Corpus load_multiwoz(const std::filesystem::path& path, Split split, const LoadOptions& opts = {});

// One step per take_action gold turn, in turn order. Names missing from the
// domain keep the raw name as description and add a diagnostic.
Workflow derive_workflow(const Dialogue& dialogue, const StepDomain& domain,
                         std::vector<Diagnostic>* diagnostics = nullptr);

// Records a diagnostic for every gold step name not present in the domain.
void check_domain_coverage(Corpus& corpus);

}  // namespace wdflow
