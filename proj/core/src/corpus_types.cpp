#include <algorithm>

#include "wdflow/corpus.hpp"
#include "wdflow/error.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

std::string_view to_string(Speaker s) {
  switch (s) {
    case Speaker::kCustomer: return "customer";
    case Speaker::kAgent: return "agent";
    case Speaker::kAction: return "action";
    case Speaker::kSystem: return "system";
  }
  return "customer";
}

std::optional<Speaker> parse_speaker(std::string_view s) {
  const auto t = text::to_lower_ascii(text::trim(s));
  if (t == "customer" || t == "user") return Speaker::kCustomer;
  if (t == "agent") return Speaker::kAgent;
  if (t == "action") return Speaker::kAction;
  if (t == "system") return Speaker::kSystem;
  return std::nullopt;
}

std::string_view to_string(NextStep s) {
  switch (s) {
    case NextStep::kRetrieveUtterance: return "retrieve_utterance";
    case NextStep::kTakeAction: return "take_action";
    case NextStep::kEndConversation: return "end_conversation";
  }
  return "end_conversation";
}

std::optional<NextStep> parse_next_step(std::string_view s) {
  const auto t = text::to_lower_ascii(text::trim(s));
  if (t == "retrieve_utterance") return NextStep::kRetrieveUtterance;
  if (t == "take_action") return NextStep::kTakeAction;
  if (t == "end_conversation") return NextStep::kEndConversation;
  return std::nullopt;
}

bool Workflow::contains(std::string_view step_name) const {
  return std::any_of(steps.begin(), steps.end(), [&](const WorkflowStep& s) { return s.name == step_name; });
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "test";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev" || s == "validation") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw Error(ErrorCode::kUnknownSplit, "'" + std::string(s) + "' (expected train, dev or test)");
}

Workflow derive_workflow(const Dialogue& dialogue, const StepDomain& domain, std::vector<Diagnostic>* diagnostics) {
  Workflow wf;
  for (const auto& turn : dialogue.gold_turns) {
    if (turn.nextstep != NextStep::kTakeAction || !turn.action_name) continue;
    WorkflowStep step;
    step.name = *turn.action_name;
    if (const auto* entry = domain.find_by_name(step.name)) {
      step.description = entry->description;
    } else {
      step.description = step.name;
      if (diagnostics)
        diagnostics->push_back({dialogue.id, "out_of_domain_step",
                                "step '" + step.name + "' not in domain '" + domain.dataset_tag() + "'"});
    }
    step.values = turn.action_values;
    wf.steps.push_back(std::move(step));
  }
  return wf;
}

void check_domain_coverage(Corpus& corpus) {
  for (const auto& d : corpus.dialogues) {
    if (!d.gold_workflow) continue;
    for (const auto& s : d.gold_workflow->steps)
      if (!corpus.domain.contains(s.name))
        corpus.diagnostics.push_back({d.id, "out_of_domain_step",
                                      "step '" + s.name + "' not in domain '" + corpus.domain.dataset_tag() + "'"});
  }
}

}  // namespace wdflow
