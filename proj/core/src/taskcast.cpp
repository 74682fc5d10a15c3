#include "wdflow/taskcast.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "json_util.hpp"
#include "wdflow/error.hpp"
#include "wdflow/random.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

std::string_view to_string(Task t) {
  switch (t) {
    case Task::kWD: return "wd";
    case Task::kAST: return "ast";
    case Task::kCDS: return "cds";
  }
  return "wd";
}

Task parse_task(std::string_view s) {
  const auto t = text::to_lower_ascii(s);
  if (t == "wd") return Task::kWD;
  if (t == "ast") return Task::kAST;
  if (t == "cds") return Task::kCDS;
  throw Error(ErrorCode::kInvalidConfig, "unknown task '" + std::string(s) + "'");
}

const std::string& step_label(const WorkflowStep& step, bool use_names) {
  return use_names ? step.name : step.description;
}

std::string turn_sample_id(const Dialogue& dialogue, const GoldTurn& turn) {
  return dialogue.id + "#" + std::to_string(turn.turn_index);
}

std::vector<std::size_t> domain_permutation(std::size_t n, std::uint64_t seed, std::string_view sample_id) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = SeededRng::keyed(seed, sample_id);
  rng.shuffle(order);
  return order;
}

namespace {

std::string prior_text(const Dialogue& d, std::size_t turn_index) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < turn_index && i < d.utterances.size(); ++i) parts.push_back(d.utterances[i].text);
  return text::join(parts, " ");
}

std::string action_payload(const std::string& name, const std::vector<std::string>& values) {
  if (values.empty()) return name;
  return name + ":" + text::join(values, ", ");
}

void check_turn_index(const Dialogue& d, const GoldTurn& turn) {
  if (turn.turn_index >= d.utterances.size())
    throw Error(ErrorCode::kMissingGoldFields, turn_sample_id(d, turn) + ": turn index out of range");
}

}  // namespace

CastSample cast_wd(const Dialogue& dialogue, const StepDomain* domain, const CastConfig& cfg) {
  std::vector<std::string> texts;
  for (const auto& u : dialogue.utterances)
    if (u.speaker != Speaker::kAction) texts.push_back(u.text);
  if (texts.empty()) throw Error(ErrorCode::kEmptyDialogue, dialogue.id);
  if (!dialogue.gold_workflow) throw Error(ErrorCode::kMissingGoldFields, dialogue.id + ": no gold workflow");

  CastSample s;
  s.id = dialogue.id;
  s.task = Task::kWD;
  s.input_text = cfg.prefixes.wd_source + "Dialogue: " + text::join(texts, " ");
  if (cfg.include_domain) {
    if (!domain) throw Error(ErrorCode::kInvalidConfig, "include_domain requires a step domain");
    std::vector<std::string> labels;
    for (const auto& e : domain->entries()) labels.push_back(cfg.use_names_not_descriptions ? e.name : e.description);
    if (cfg.shuffle_seed) {
      std::vector<std::string> permuted;
      for (auto i : domain_permutation(labels.size(), *cfg.shuffle_seed, s.id)) permuted.push_back(labels[i]);
      labels = std::move(permuted);
    }
    s.input_text += " Steps: " + text::join(labels, ",");
  }

  std::vector<std::string> items;
  for (const auto& step : dialogue.gold_workflow->steps) {
    std::string item = step_label(step, cfg.use_names_not_descriptions);
    if (cfg.include_values && !step.values.empty()) item += ": " + text::join(step.values, ";");
    items.push_back(std::move(item));
  }
  s.target_text = cfg.prefixes.wd_target + text::join(items, ",");
  return s;
}

CastSample cast_ast(const Dialogue& dialogue, const GoldTurn& turn, const CastConfig& cfg) {
  if (turn.nextstep != NextStep::kTakeAction || !turn.action_name)
    throw Error(ErrorCode::kNotAnActionTurn, turn_sample_id(dialogue, turn));
  check_turn_index(dialogue, turn);
  CastSample s;
  s.id = turn_sample_id(dialogue, turn);
  s.task = Task::kAST;
  s.input_text = cfg.prefixes.ast_source + prior_text(dialogue, turn.turn_index);
  s.target_text = cfg.prefixes.ast_target + action_payload(*turn.action_name, turn.action_values);
  return s;
}

CastSample cast_cds(const Dialogue& dialogue, const GoldTurn& turn, const CastConfig& cfg) {
  const auto id = turn_sample_id(dialogue, turn);
  if (!turn.nextstep) throw Error(ErrorCode::kMissingGoldFields, id + ": no nextstep");
  if (!turn.intent) throw Error(ErrorCode::kMissingGoldFields, id + ": no intent");
  check_turn_index(dialogue, turn);

  CastSample s;
  s.id = id;
  s.task = Task::kCDS;
  s.input_text = cfg.prefixes.cds_source + "History: " + prior_text(dialogue, turn.turn_index);
  s.target_text = cfg.prefixes.cds_target + *turn.intent + "," + std::string(to_string(*turn.nextstep));
  switch (*turn.nextstep) {
    case NextStep::kTakeAction:
      if (!turn.action_name) throw Error(ErrorCode::kMissingGoldFields, id + ": take_action without action name");
      s.target_text += "," + action_payload(*turn.action_name, turn.action_values);
      break;
    case NextStep::kRetrieveUtterance:
      if (!turn.gold_utterance) throw Error(ErrorCode::kMissingGoldFields, id + ": no gold utterance");
      if (turn.candidate_utterances.empty()) throw Error(ErrorCode::kMissingGoldFields, id + ": no candidates");
      s.input_text += " Candidates: " + text::join(turn.candidate_utterances, ",");
      s.target_text += "," + *turn.gold_utterance;
      break;
    case NextStep::kEndConversation:
      break;
  }
  return s;
}

std::vector<std::string> grammar_conflicts(const Dialogue& dialogue, Task task, const CastConfig& cfg) {
  std::vector<std::string> out;
  const auto has = [](const std::string& s, std::string_view chars) { return s.find_first_of(chars) != std::string::npos; };
  if (task == Task::kWD) {
    if (!dialogue.gold_workflow) return out;
    for (const auto& step : dialogue.gold_workflow->steps) {
      const auto& label = step_label(step, cfg.use_names_not_descriptions);
      if (has(label, ",:")) out.push_back("step label '" + label + "' contains ',' or ':'");
      if (!cfg.include_values) continue;
      for (const auto& v : step.values)
        if (has(v, ",;") || text::trim(v).size() != v.size() || v.empty())
          out.push_back("value '" + v + "' of step '" + step.name + "' is not representable in the Flow grammar");
    }
    return out;
  }
  for (const auto& turn : dialogue.gold_turns) {
    const bool action_turn = turn.nextstep == NextStep::kTakeAction && turn.action_name;
    if (task == Task::kCDS && turn.intent && has(*turn.intent, ","))
      out.push_back("intent '" + *turn.intent + "' contains ','");
    if (!action_turn) continue;
    if (has(*turn.action_name, ":,")) out.push_back("action '" + *turn.action_name + "' contains ':' or ','");
    for (const auto& v : turn.action_values)
      if (has(v, ",") || text::trim(v).size() != v.size() || v.empty())
        out.push_back("value '" + v + "' of action '" + *turn.action_name + "' is not representable");
  }
  return out;
}

CastOutput cast_corpus(const Corpus& corpus, Task task, const CastConfig& cfg) {
  CastOutput out;
  for (const auto& d : corpus.dialogues) {
    for (auto& c : grammar_conflicts(d, task, cfg)) out.diagnostics.push_back({d.id, "grammar_conflict", std::move(c)});
    if (task == Task::kWD) {
      try {
        out.samples.push_back(cast_wd(d, &corpus.domain, cfg));
      } catch (const Error& e) {
        out.diagnostics.push_back({d.id, std::string(to_string(e.code())), e.what()});
      }
      continue;
    }
    for (const auto& turn : d.gold_turns) {
      if (task == Task::kAST && turn.nextstep != NextStep::kTakeAction) continue;
      if (task == Task::kCDS && !turn.nextstep) continue;
      try {
        out.samples.push_back(task == Task::kAST ? cast_ast(d, turn, cfg) : cast_cds(d, turn, cfg));
      } catch (const Error& e) {
        out.diagnostics.push_back({turn_sample_id(d, turn), std::string(to_string(e.code())), e.what()});
      }
    }
  }
  return out;
}

nlohmann::json to_json(const CastSample& s) {
  return {{"id", s.id}, {"task", to_string(s.task)}, {"input", s.input_text}, {"target", s.target_text}};
}

CastSample cast_sample_from_json(const nlohmann::json& j) {
  try {
    return {j.at("id").get<std::string>(), parse_task(j.at("task").get<std::string>()), j.at("input").get<std::string>(),
            j.at("target").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedCorpus, std::string("cast record: ") + e.what());
  }
}

void write_cast_jsonl(const std::vector<CastSample>& samples, std::ostream& out) {
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["task"] = to_string(s.task);
    j["input"] = s.input_text;
    j["target"] = s.target_text;
    out << j.dump() << '\n';
  }
}

void write_cast_jsonl(const std::vector<CastSample>& samples, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_cast_jsonl(samples, ss);
  detail::write_file(path, ss.str());
}

std::vector<CastSample> read_cast_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<CastSample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(cast_sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kMalformedCorpus, path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace wdflow
