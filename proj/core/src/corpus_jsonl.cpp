#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "wdflow/corpus_io.hpp"
#include "wdflow/error.hpp"

namespace wdflow {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kMalformedCorpus, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return (it == j.end() || it->is_null()) ? fallback : it->get<T>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

json step_json(const WorkflowStep& s) { return {{"name", s.name}, {"description", s.description}, {"values", s.values}}; }

}  // namespace

json to_json(const Dialogue& d) {
  json utts = json::array();
  for (const auto& u : d.utterances) utts.push_back({{"speaker", to_string(u.speaker)}, {"text", u.text}});
  json turns = json::array();
  for (const auto& g : d.gold_turns) {
    json t = {{"turn_index", g.turn_index}};
    t["intent"] = g.intent ? json(*g.intent) : json(nullptr);
    t["nextstep"] = g.nextstep ? json(std::string(to_string(*g.nextstep))) : json(nullptr);
    t["action_name"] = g.action_name ? json(*g.action_name) : json(nullptr);
    t["action_values"] = g.action_values;
    t["candidate_utterances"] = g.candidate_utterances;
    t["gold_utterance"] = g.gold_utterance ? json(*g.gold_utterance) : json(nullptr);
    turns.push_back(std::move(t));
  }
  json j = {{"id", d.id}, {"utterances", std::move(utts)}, {"gold_turns", std::move(turns)}};
  if (d.gold_workflow) {
    json steps = json::array();
    for (const auto& s : d.gold_workflow->steps) steps.push_back(step_json(s));
    j["gold_workflow"] = std::move(steps);
  } else {
    j["gold_workflow"] = nullptr;
  }
  return j;
}

Dialogue dialogue_from_json(const json& j) {
  try {
    Dialogue d;
    d.id = j.at("id").get<std::string>();
    for (const auto& u : j.at("utterances")) {
      auto sp = parse_speaker(u.at("speaker").get<std::string>());
      if (!sp) bad(d.id + ": unknown speaker");
      d.utterances.push_back({*sp, u.at("text").get<std::string>()});
    }
    for (const auto& t : j.value("gold_turns", json::array())) {
      GoldTurn g;
      g.turn_index = t.at("turn_index").get<std::size_t>();
      g.intent = opt_string(t, "intent");
      if (auto ns = opt_string(t, "nextstep")) {
        g.nextstep = parse_next_step(*ns);
        if (!g.nextstep) bad(d.id + ": unknown nextstep '" + *ns + "'");
      }
      g.action_name = opt_string(t, "action_name");
      g.action_values = get_or(t, "action_values", std::vector<std::string>{});
      g.candidate_utterances = get_or(t, "candidate_utterances", std::vector<std::string>{});
      g.gold_utterance = opt_string(t, "gold_utterance");
      if (g.turn_index >= d.utterances.size()) bad(d.id + ": gold turn index out of range");
      if (!d.gold_turns.empty() && g.turn_index <= d.gold_turns.back().turn_index)
        bad(d.id + ": gold turn indices not strictly increasing");
      d.gold_turns.push_back(std::move(g));
    }
    if (auto it = j.find("gold_workflow"); it != j.end() && !it->is_null()) {
      Workflow wf;
      for (const auto& s : *it)
        wf.steps.push_back({s.at("name").get<std::string>(), s.at("description").get<std::string>(),
                            get_or(s, "values", std::vector<std::string>{})});
      d.gold_workflow = std::move(wf);
    }
    return d;
  } catch (const json::exception& e) {
    bad(std::string("dialogue record: ") + e.what());
  }
}

json to_json(const StepDomain& domain, Split split) {
  json entries = json::array();
  for (const auto& e : domain.entries()) entries.push_back({{"name", e.name}, {"description", e.description}});
  return {{"dataset_tag", domain.dataset_tag()}, {"split", to_string(split)}, {"entries", std::move(entries)}};
}

StepDomain domain_from_json(const json& j) {
  try {
    std::vector<DomainEntry> entries;
    for (const auto& e : j.at("entries"))
      entries.push_back({e.at("name").get<std::string>(), e.at("description").get<std::string>()});
    return StepDomain(j.value("dataset_tag", std::string("custom")), std::move(entries));
  } catch (const json::exception& e) {
    bad(std::string("domain file: ") + e.what());
  }
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& d : corpus.dialogues) out << to_json(d).dump() << '\n';
}

std::filesystem::path domain_sidecar(const std::filesystem::path& corpus_path) {
  return std::filesystem::path(corpus_path.string() + ".domain.json");
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_corpus_jsonl(corpus, ss);
  detail::write_file(path, ss.str());
  detail::write_file(domain_sidecar(path), to_json(corpus.domain, corpus.split).dump(2) + "\n");
}

Corpus read_corpus(const std::filesystem::path& path, const std::optional<StepDomain>& fallback_domain, Split split) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  Corpus c;
  c.split = split;
  const auto sidecar = domain_sidecar(path);
  if (std::filesystem::exists(sidecar)) {
    const auto j = detail::read_json_file(sidecar, ErrorCode::kMalformedCorpus);
    c.domain = domain_from_json(j);
    if (auto it = j.find("split"); it != j.end() && it->is_string()) c.split = parse_split(it->get<std::string>());
  } else if (fallback_domain) {
    c.domain = *fallback_domain;
  } else {
    throw Error(ErrorCode::kIo, "no domain file " + sidecar.string() + " and no domain given");
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      c.dialogues.push_back(dialogue_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      bad(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  check_domain_coverage(c);
  return c;
}

}  // namespace wdflow
