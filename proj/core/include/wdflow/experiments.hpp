#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "wdflow/corpus.hpp"
#include "wdflow/evaluation.hpp"
#include "wdflow/inference.hpp"
#include "wdflow/stepmatch.hpp"
#include "wdflow/taskcast.hpp"

namespace wdflow {

struct InDistribution {
  bool operator==(const InDistribution&) const = default;
};

struct HoldoutStep {
  std::string step;
  bool apply_to_dev = false;  // also filter the eval corpus when it is a dev split
  bool operator==(const HoldoutStep&) const = default;
};

struct ZeroShot {
  std::string source;  // domain tag of the training data
  std::string target;  // domain tag of the eval data
  bool operator==(const ZeroShot&) const = default;
};

struct FewShot {
  int k = 1;
  std::uint64_t seed = 0;
  bool operator==(const FewShot&) const = default;
};

using SplitSpec = std::variant<InDistribution, HoldoutStep, ZeroShot, FewShot>;

std::string split_kind(const SplitSpec& spec);  // "in_distribution" | "holdout_step" | "zero_shot" | "few_shot"
nlohmann::json to_json(const SplitSpec& spec);
SplitSpec split_spec_from_json(const nlohmann::json& j);  // throws Error(kInvalidConfig)

struct HoldoutResult {
  Corpus train;
  std::size_t removed = 0;
  std::size_t kept = 0;
};

// Drops every dialogue whose gold workflow mentions `step`. Throws
// Error(kUnknownStep) when the step is not in corpus.domain.
HoldoutResult holdout_step(const Corpus& corpus, const std::string& step);

struct StepCoverage {
  std::string step;
  std::size_t available = 0;  // dialogues in the corpus containing the step
  std::size_t drawn = 0;      // min(k, available)
  std::size_t in_sample = 0;  // sampled dialogues containing the step
};

struct FewShotResult {
  Corpus sample;
  std::vector<StepCoverage> coverage;  // domain order, occurring steps only
};

// Per domain step, draws up to k containing dialogues with an independent
// stream keyed by (seed, step name); the sample is their union in corpus order.
FewShotResult few_shot_sample(const Corpus& corpus, int k, std::uint64_t seed);

struct ExperimentInputs {
  Task task = Task::kWD;
  SplitSpec split = InDistribution{};
  std::optional<Corpus> train;
  Corpus eval;
  CastConfig cast;
  MatchConfig match;
  RunMetadata meta;
  int max_new_units = 256;
};

struct ExperimentResult {
  std::filesystem::path run_dir;
  bool skipped = false;  // report.json already existed
  nlohmann::ordered_json report;
  std::optional<EvalReport> evaluation;
  nlohmann::ordered_json split_info;
  GenStats stats;
};

// cast -> generate -> parse -> score. Artifacts land in run_dir; inputs are
// written before generation so they survive backend failures. An existing
// run_dir/report.json makes this a no-op.
ExperimentResult run_experiment(const ExperimentInputs& inputs, GenerationBackend& backend,
                                const std::filesystem::path& run_dir);

}  // namespace wdflow
