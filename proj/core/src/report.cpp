#include <cmath>
#include <sstream>

#include "json_util.hpp"
#include "wdflow/evaluation.hpp"

#ifndef WDFLOW_VERSION
#define WDFLOW_VERSION "dev"
#endif

namespace wdflow {

using ojson = nlohmann::ordered_json;

std::string library_version() { return WDFLOW_VERSION; }

namespace {

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

ojson ratio(const Ratio& r) { return r.defined() ? ojson(round4(r.value())) : ojson(nullptr); }

ojson counts(const Ratio& r) { return {{"hits", r.hits}, {"total", r.total}}; }

}  // namespace

ojson report_json(const EvalReport& r) {
  ojson j;
  j["task"] = to_string(r.task);
  ojson m;
  if (r.wd) {
    const auto& s = *r.wd;
    m["em"] = round4(s.exact_match);
    m["ce"] = round4(s.cascading);
    m["n_samples"] = s.n_samples;
    const auto failures = s.failure_breakdown.wrong_step + s.failure_breakdown.length_mismatch;
    ojson fb;
    fb["wrong_step"] = s.failure_breakdown.wrong_step;
    fb["length_mismatch"] = s.failure_breakdown.length_mismatch;
    fb["wrong_step_fraction"] =
        failures ? ojson(round4(double(s.failure_breakdown.wrong_step) / double(failures))) : ojson(nullptr);
    fb["length_mismatch_fraction"] =
        failures ? ojson(round4(double(s.failure_breakdown.length_mismatch) / double(failures))) : ojson(nullptr);
    m["failure_breakdown"] = fb;
  }
  if (r.ast) {
    m["b_slot"] = ratio(r.ast->b_slot);
    m["value"] = ratio(r.ast->value);
    m["action"] = ratio(r.ast->action);
    m["n_samples"] = r.ast->b_slot.total;
  }
  if (r.cds) {
    const auto& s = *r.cds;
    m["intent"] = ratio(s.intent);
    m["nextstep"] = ratio(s.nextstep);
    m["b_slot"] = ratio(s.b_slot);
    m["value"] = ratio(s.value);
    m["recall_at_1"] = ratio(s.recall_at_1);
    m["ce"] = round4(s.cascading);
    m["n_turns"] = s.intent.total;
    m["n_conversations"] = s.n_conversations;
    m["counts"] = {{"intent", counts(s.intent)},   {"nextstep", counts(s.nextstep)},
                   {"b_slot", counts(s.b_slot)},   {"value", counts(s.value)},
                   {"recall_at_1", counts(s.recall_at_1)}};
  }
  j["metrics"] = m;

  ojson cfg;
  cfg["match_mode"] = to_string(r.match_mode);
  cfg["threshold"] = r.threshold;
  cfg["compare_values"] = r.compare_values;
  if (!r.provider.empty()) cfg["provider"] = r.provider;
  cfg["domain_tag"] = r.meta.domain_tag;
  cfg["include_domain"] = r.meta.include_domain;
  cfg["use_names"] = r.meta.use_names;
  cfg["include_values"] = r.meta.include_values;
  cfg["shuffle_seed"] = r.meta.shuffle_seed ? ojson(*r.meta.shuffle_seed) : ojson(nullptr);
  cfg["sample_seed"] = r.meta.sample_seed ? ojson(*r.meta.sample_seed) : ojson(nullptr);
  if (!r.meta.extra.empty()) cfg["extra"] = ojson::parse(r.meta.extra.dump());
  j["config"] = cfg;

  ojson flags = ojson::object();
  for (const auto& [k, v] : r.parse_flags) flags[k] = v;
  j["parse_flags"] = flags;
  j["id_mismatch"] = {{"missing", r.missing_ids}, {"unexpected", r.unexpected_ids}};
  if (!r.meta.manifest_hash.empty()) j["manifest_hash"] = r.meta.manifest_hash;
  j["version"] = library_version();
  return j;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir, bool per_sample) {
  detail::write_file(dir / "report.json", report_json(report).dump(2) + "\n");
  if (!per_sample) return;
  std::ostringstream ss;
  for (const auto& row : report.per_sample) ss << row.dump() << '\n';
  detail::write_file(dir / "per_sample.jsonl", ss.str());
}

}  // namespace wdflow
