#include <set>

#include "corpus_internal.hpp"
#include "json_util.hpp"
#include "wdflow/corpus.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

namespace {

using nlohmann::json;

const std::set<std::string> kConversationFields = {"convo_id", "id", "scenario", "original", "delexed", "turns"};
const std::set<std::string> kTurnFields = {"speaker", "text", "turn_count", "targets", "candidates"};

class AbcdReader {
 public:
  AbcdReader(const LoadOptions& opts, const json* utterance_table, std::vector<Diagnostic>& diags)
      : opts_(opts), table_(utterance_table), diags_(diags) {}

  Dialogue read(const json& conv, const std::string& where) {
    if (!conv.is_object()) malformed(where, "conversation is not an object");
    check_fields(conv, kConversationFields, where);

    Dialogue d;
    const json* id = find(conv, "convo_id");
    if (!id) id = find(conv, "id");
    if (!id || id->is_null()) malformed(where, "missing convo_id");
    d.id = id->is_string() ? id->get<std::string>() : id->dump();

    const json* turns = find(conv, "delexed");
    std::string turns_key = "delexed";
    if (!turns) {
      turns = find(conv, "turns");
      turns_key = "turns";
    }
    if (!turns || !turns->is_array()) malformed(where, "missing turn list ('delexed' or 'turns')");

    for (std::size_t i = 0; i < turns->size(); ++i)
      read_turn((*turns)[i], where + "." + turns_key + "[" + std::to_string(i) + "]", d);
    return d;
  }

 private:
  [[noreturn]] void malformed(const std::string& where, const std::string& what) const {
    throw Error(ErrorCode::kMalformedCorpus, where + ": " + what);
  }

  void note(const std::string& where, const std::string& code, const std::string& msg, bool strict_violation) {
    diags_.push_back({where, code, msg, strict_violation});
  }

  static const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  void check_fields(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : obj.items())
      if (!known.count(key)) note(where, "unknown_field", "unknown field '" + key + "'", true);
  }

  std::string resolve_candidate(const json& c, const std::string& where) {
    if (c.is_string()) return c.get<std::string>();
    if (!c.is_number_integer()) malformed(where, "candidate is neither a string nor an id");
    const auto idx = c.get<long long>();
    if (!table_) malformed(where, "integer candidate ids need an utterances table");
    if (idx < 0 || static_cast<std::size_t>(idx) >= table_->size())
      malformed(where, "candidate id " + std::to_string(idx) + " out of range");
    const auto& u = (*table_)[static_cast<std::size_t>(idx)];
    if (!u.is_string()) malformed(where, "utterance table entry is not a string");
    return u.get<std::string>();
  }

  void read_turn(const json& t, const std::string& where, Dialogue& d) {
    if (!t.is_object()) malformed(where, "turn is not an object");
    check_fields(t, kTurnFields, where);

    const json* speaker = find(t, "speaker");
    const json* txt = find(t, "text");
    if (!speaker || !speaker->is_string()) malformed(where, "missing speaker");
    if (!txt || !txt->is_string()) malformed(where, "missing text");
    const auto role = parse_speaker(speaker->get<std::string>());
    if (!role) malformed(where, "unknown speaker '" + speaker->get<std::string>() + "'");
    if (!find(t, "turn_count")) note(where, "missing_field", "turn has no turn_count", true);

    const auto body = std::string(text::trim(txt->get<std::string>()));
    if (body.empty()) {
      note(where, "empty_utterance", "dropped utterance with empty text", true);
      return;
    }
    d.utterances.push_back({*role, body});

    const json* targets = find(t, "targets");
    if (!targets || targets->is_null()) return;
    if (!targets->is_array() || targets->size() < 4) malformed(where + ".targets", "expected [intent, nextstep, action, values, index]");

    const auto opt_string = [&](const json& v, const char* field) -> std::optional<std::string> {
      if (v.is_null()) return std::nullopt;
      if (!v.is_string()) malformed(where + ".targets", std::string(field) + " is not a string");
      auto s = v.get<std::string>();
      if (s.empty()) return std::nullopt;
      return s;
    };

    GoldTurn g;
    g.turn_index = d.utterances.size() - 1;
    g.intent = opt_string((*targets)[0], "intent");
    if (auto ns = opt_string((*targets)[1], "nextstep")) {
      g.nextstep = parse_next_step(*ns);
      if (!g.nextstep) malformed(where + ".targets", "unknown nextstep '" + *ns + "'");
    }
    if (!g.intent && !g.nextstep) return;

    auto action = opt_string((*targets)[2], "action");
    std::vector<std::string> values;
    const auto& vals = (*targets)[3];
    if (vals.is_array()) {
      for (const auto& v : vals) {
        if (!v.is_string()) malformed(where + ".targets", "value is not a string");
        values.push_back(v.get<std::string>());
      }
    } else if (!vals.is_null()) {
      malformed(where + ".targets", "values is not a list");
    }
    long long utt_index = -1;
    if (targets->size() > 4 && (*targets)[4].is_number_integer()) utt_index = (*targets)[4].get<long long>();

    if (g.nextstep == NextStep::kTakeAction) {
      if (!action) malformed(where + ".targets", "take_action turn without an action name");
      g.action_name = std::move(action);
      g.action_values = std::move(values);
    } else if (action) {
      note(where, "stray_action", "action '" + *action + "' on a non-action turn was dropped", true);
    }

    if (g.nextstep == NextStep::kRetrieveUtterance) {
      if (const json* cands = find(t, "candidates"); cands && cands->is_array()) {
        for (std::size_t i = 0; i < cands->size(); ++i) {
          const auto& c = (*cands)[i];
          if (c.is_number_integer() && c.get<long long>() < 0) continue;
          g.candidate_utterances.push_back(resolve_candidate(c, where + ".candidates[" + std::to_string(i) + "]"));
        }
      }
      if (utt_index >= 0 && static_cast<std::size_t>(utt_index) < g.candidate_utterances.size()) {
        g.gold_utterance = g.candidate_utterances[static_cast<std::size_t>(utt_index)];
      } else {
        g.gold_utterance = body;
      }
      if (g.candidate_utterances.empty()) {
        note(where, "no_candidates", "retrieve_utterance turn without candidates; using its own text", true);
        g.candidate_utterances.push_back(*g.gold_utterance);
      }
    }
    d.gold_turns.push_back(std::move(g));
  }

  const LoadOptions& opts_;
  const json* table_;
  std::vector<Diagnostic>& diags_;
};

void enforce_strict(const Corpus& c, const LoadOptions& opts) {
  if (!opts.strict) return;
  std::string listing;
  std::size_t n = 0;
  for (const auto& d : c.diagnostics) {
    if (!d.strict_violation) continue;
    ++n;
    listing += "\n  " + d.record + ": " + d.message;
  }
  if (n) throw Error(ErrorCode::kStrictViolation, std::to_string(n) + " violation(s):" + listing);
}

}  // namespace

namespace detail {
void enforce_strict_mode(const Corpus& c, const LoadOptions& opts) { enforce_strict(c, opts); }
}  // namespace detail

Corpus load_abcd(const std::filesystem::path& path, Split split, const LoadOptions& opts) {
  const auto doc = detail::read_json_file(path, ErrorCode::kMalformedCorpus);
  if (!doc.is_object()) throw Error(ErrorCode::kMalformedCorpus, path.string() + ": top level must be an object keyed by split");

  const auto key = std::string(to_string(split));
  auto it = doc.find(key);
  if (it == doc.end() && split == Split::kDev) it = doc.find("validation");
  if (it == doc.end()) throw Error(ErrorCode::kUnknownSplit, "split '" + key + "' not present in " + path.string());
  if (!it->is_array()) throw Error(ErrorCode::kMalformedCorpus, key + ": conversation list is not an array");

  json table;
  bool have_table = false;
  auto table_path = opts.utterances_path;
  if (!table_path) {
    auto sibling = path.parent_path() / "utterances.json";
    if (std::filesystem::exists(sibling)) table_path = sibling;
  }
  if (table_path) {
    table = detail::read_json_file(*table_path, ErrorCode::kMalformedCorpus);
    if (!table.is_array()) throw Error(ErrorCode::kMalformedCorpus, table_path->string() + ": expected a list of strings");
    have_table = true;
  }

  Corpus corpus;
  corpus.domain = builtin_domain("abcd");
  corpus.split = split;
  AbcdReader reader(opts, have_table ? &table : nullptr, corpus.diagnostics);
  for (std::size_t i = 0; i < it->size(); ++i) {
    auto d = reader.read((*it)[i], key + "[" + std::to_string(i) + "]");
    d.gold_workflow = derive_workflow(d, corpus.domain, &corpus.diagnostics);
    corpus.dialogues.push_back(std::move(d));
  }
  enforce_strict(corpus, opts);
  return corpus;
}

}  // namespace wdflow
