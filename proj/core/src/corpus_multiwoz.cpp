#include <algorithm>
#include <map>
#include <set>

#include "corpus_internal.hpp"
#include "json_util.hpp"
#include "wdflow/corpus.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

const std::set<std::string> kDialogueFields = {"dialogue_id", "services", "turns"};
const std::set<std::string> kTurnFields = {"turn_id", "speaker", "utterance", "frames"};

struct ActiveIntent {
  std::string intent;
  std::vector<std::string> values;  // slot values in slot-name order
};

std::vector<ActiveIntent> active_intents(const json& turn, const std::string& where) {
  std::vector<ActiveIntent> out;
  auto frames = turn.find("frames");
  if (frames == turn.end() || !frames->is_array()) return out;
  for (const auto& f : *frames) {
    if (!f.is_object()) throw Error(ErrorCode::kMalformedCorpus, where + ": frame is not an object");
    auto state = f.find("state");
    if (state == f.end() || !state->is_object()) continue;
    auto ai = state->find("active_intent");
    if (ai == state->end() || !ai->is_string()) continue;
    auto name = ai->get<std::string>();
    if (name.empty() || text::iequals(name, "NONE")) continue;
    ActiveIntent a{name, {}};
    if (auto sv = state->find("slot_values"); sv != state->end() && sv->is_object()) {
      std::map<std::string, std::string> ordered;
      for (const auto& [slot, vals] : sv->items()) {
        if (vals.is_array() && !vals.empty() && vals.front().is_string()) ordered[slot] = vals.front().get<std::string>();
        else if (vals.is_string()) ordered[slot] = vals.get<std::string>();
      }
      for (auto& [_, v] : ordered) a.values.push_back(v);
    }
    if (std::none_of(out.begin(), out.end(), [&](const ActiveIntent& x) { return x.intent == a.intent; }))
      out.push_back(std::move(a));
  }
  return out;
}

Dialogue read_dialogue(const json& dj, const std::string& where, const StepDomain& domain, const LoadOptions& opts,
                       std::vector<Diagnostic>& diags) {
  if (!dj.is_object()) throw Error(ErrorCode::kMalformedCorpus, where + ": dialogue is not an object");
  for (const auto& [key, _] : dj.items())
    if (!kDialogueFields.count(key)) diags.push_back({where, "unknown_field", "unknown field '" + key + "'", true});

  Dialogue d;
  auto id = dj.find("dialogue_id");
  if (id == dj.end() || !id->is_string()) throw Error(ErrorCode::kMalformedCorpus, where + ": missing dialogue_id");
  d.id = id->get<std::string>();
  auto turns = dj.find("turns");
  if (turns == dj.end() || !turns->is_array()) throw Error(ErrorCode::kMalformedCorpus, where + ": missing turns");

  Workflow wf;
  // Intents active at the previous user turn, mapped to their open step.
  std::map<std::string, std::size_t> open;
  for (std::size_t i = 0; i < turns->size(); ++i) {
    const auto& t = (*turns)[i];
    const auto tw = where + ".turns[" + std::to_string(i) + "]";
    if (!t.is_object()) throw Error(ErrorCode::kMalformedCorpus, tw + ": turn is not an object");
    for (const auto& [key, _] : t.items())
      if (!kTurnFields.count(key)) diags.push_back({tw, "unknown_field", "unknown field '" + key + "'", true});
    auto sp = t.find("speaker");
    auto ut = t.find("utterance");
    if (sp == t.end() || !sp->is_string()) throw Error(ErrorCode::kMalformedCorpus, tw + ": missing speaker");
    if (ut == t.end() || !ut->is_string()) throw Error(ErrorCode::kMalformedCorpus, tw + ": missing utterance");
    const auto spk = text::to_lower_ascii(sp->get<std::string>());
    Speaker role;
    if (spk == "user") role = Speaker::kCustomer;
    else if (spk == "system") role = Speaker::kSystem;
    else if (auto p = parse_speaker(spk)) role = *p;
    else throw Error(ErrorCode::kMalformedCorpus, tw + ": unknown speaker '" + sp->get<std::string>() + "'");

    const auto body = std::string(text::trim(ut->get<std::string>()));
    if (body.empty()) diags.push_back({tw, "empty_utterance", "dropped utterance with empty text", true});
    else d.utterances.push_back({role, body});

    if (role != Speaker::kCustomer) continue;
    std::map<std::string, std::size_t> now;
    for (auto& a : active_intents(t, tw)) {
      auto it = open.find(a.intent);
      std::size_t idx;
      if (it == open.end()) {
        WorkflowStep step;
        step.name = a.intent;
        const auto* entry = domain.find_by_name(a.intent);
        step.description = entry ? entry->description : a.intent;
        wf.steps.push_back(std::move(step));
        idx = wf.steps.size() - 1;
      } else {
        idx = it->second;
      }
      if (opts.include_values) wf.steps[idx].values = std::move(a.values);
      now[a.intent] = idx;
    }
    open = std::move(now);
  }
  if (wf.empty()) diags.push_back({d.id, "empty_workflow", "no active intents in dialogue", false});
  d.gold_workflow = std::move(wf);
  return d;
}

std::vector<fs::path> collect_files(const fs::path& path, Split split) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {path};
  fs::path dir = path;
  const auto split_dir = path / std::string(to_string(split));
  if (fs::is_directory(split_dir)) dir = split_dir;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

Corpus load_multiwoz(const fs::path& path, Split split, const LoadOptions& opts) {
  Corpus corpus;
  corpus.domain = builtin_domain(opts.multiwoz_domain);
  corpus.split = split;
  for (const auto& file : collect_files(path, split)) {
    const auto doc = detail::read_json_file(file, ErrorCode::kMalformedCorpus);
    if (!doc.is_array()) {
      if (fs::is_directory(path)) continue;  // schema.json and friends
      throw Error(ErrorCode::kMalformedCorpus, file.string() + ": expected a list of dialogues");
    }
    const auto stem = file.filename().string();
    for (std::size_t i = 0; i < doc.size(); ++i)
      corpus.dialogues.push_back(
          read_dialogue(doc[i], stem + "[" + std::to_string(i) + "]", corpus.domain, opts, corpus.diagnostics));
  }
  check_domain_coverage(corpus);
  detail::enforce_strict_mode(corpus, opts);
  return corpus;
}

}  // namespace wdflow
