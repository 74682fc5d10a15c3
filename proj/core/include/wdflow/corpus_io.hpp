#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "wdflow/corpus.hpp"

// Normalized corpus dump: one Dialogue object per JSONL line, plus a sidecar
// domain file {"dataset_tag", "split", "entries": [{"name", "description"}]}.
namespace wdflow {

nlohmann::json to_json(const Dialogue& d);
Dialogue dialogue_from_json(const nlohmann::json& j);  // throws Error(kMalformedCorpus)

nlohmann::json to_json(const StepDomain& domain, Split split);
StepDomain domain_from_json(const nlohmann::json& j);

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

// Writes `<path>` and `<path>.domain.json`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Reads `<path>`; the domain comes from `<path>.domain.json` when present,
// otherwise from `fallback_domain`.
Corpus read_corpus(const std::filesystem::path& path, const std::optional<StepDomain>& fallback_domain = std::nullopt,
                   Split split = Split::kTest);

std::filesystem::path domain_sidecar(const std::filesystem::path& corpus_path);

}  // namespace wdflow
