#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wdflow/corpus.hpp"
#include "wdflow/flowparse.hpp"
#include "wdflow/stepmatch.hpp"

namespace wdflow {

template <class T>
struct Keyed {
  std::string id;
  T value;
};

// hits / total; undefined (reported as null) when total == 0.
struct Ratio {
  std::size_t hits = 0;
  std::size_t total = 0;

  bool defined() const { return total > 0; }
  double value() const { return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0; }
  void add(bool hit) {
    ++total;
    hits += hit ? 1 : 0;
  }
};

// ---- Workflow discovery -------------------------------------------------

// Gold workflow in the same surface form the model is asked to produce.
std::vector<ParsedStep> gold_steps(const Workflow& workflow, bool use_names);

struct AlignedStep {
  ParsedStep step;
  bool padded = false;  // the "Missing" sentinel; never matches
};

struct Alignment {
  std::vector<AlignedStep> steps;  // always gold length
  std::size_t original_length = 0;
};

// Chops long predictions to the gold length and pads short ones with the
// sentinel step.
Alignment align(const ParsedWD& pred, std::size_t gold_length);

// Per-position match outcome after alignment.
std::vector<bool> position_matches(const ParsedWD& pred, std::span<const ParsedStep> gold, const MatchConfig& cfg);

// 1 iff the unaligned prediction has gold length and every position matches.
// An empty gold workflow is matched only by an empty prediction.
int exact_match(const ParsedWD& pred, std::span<const ParsedStep> gold, const MatchConfig& cfg);

// Longest all-correct prefix of the aligned prediction divided by the gold
// length. Equals exact_match for an empty gold workflow.
double cascading_eval(const ParsedWD& pred, std::span<const ParsedStep> gold, const MatchConfig& cfg);

struct FailureBreakdown {
  std::size_t wrong_step = 0;       // lengths agree, some step differs
  std::size_t length_mismatch = 0;  // predicted length differs from gold
};

struct WDScore {
  double exact_match = 0.0;
  double cascading = 0.0;
  std::size_t n_samples = 0;
  FailureBreakdown failure_breakdown;
};

struct WDSampleResult {
  std::string id;
  int exact_match = 0;
  double cascading = 0.0;
  std::size_t pred_length = 0;
  std::size_t gold_length = 0;
  std::size_t correct_prefix = 0;
};

// Throws Error(kIdMismatch) unless preds and golds are id-aligned.
WDScore wd_score(const std::vector<Keyed<ParsedWD>>& preds, const std::vector<Keyed<std::vector<ParsedStep>>>& golds,
                 const MatchConfig& cfg, std::vector<WDSampleResult>* per_sample = nullptr);

// ---- Action state tracking ----------------------------------------------

struct GoldAction {
  std::string action;
  std::vector<std::string> values;
};

struct ASTScore {
  Ratio b_slot;
  Ratio value;
  Ratio action;  // joint
};

struct ASTSampleResult {
  std::string id;
  bool b_slot = false;
  bool value = false;
};

bool value_lists_equal(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

ASTScore ast_score(const std::vector<Keyed<ParsedAST>>& preds, const std::vector<Keyed<GoldAction>>& golds,
                   std::vector<ASTSampleResult>* per_sample = nullptr);

// ---- Cascading dialogue success -----------------------------------------

struct CDSGold {
  std::string id;
  std::string conversation;
  std::size_t position = 0;  // order of the turn within its conversation
  GoldTurn turn;
};

struct CDSScore {
  Ratio intent;
  Ratio nextstep;
  Ratio b_slot;       // take_action turns
  Ratio value;        // take_action turns
  Ratio recall_at_1;  // retrieve_utterance turns
  double cascading = 0.0;
  std::size_t n_conversations = 0;
};

struct CDSSampleResult {
  std::string id;
  bool intent = false;
  bool nextstep = false;
  bool correct = false;
};

CDSScore cds_score(const std::vector<Keyed<ParsedCDS>>& preds, const std::vector<CDSGold>& golds,
                   std::vector<CDSSampleResult>* per_sample = nullptr);

}  // namespace wdflow
