#include "wdflow/manifest.hpp"

#include "json_util.hpp"
#include "wdflow/corpus_io.hpp"
#include "wdflow/error.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  static const json kNull;
  auto it = j.find(key);
  return it == j.end() ? kNull : *it;
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const char* what) {
  const auto& v = field(j, key);
  if (v.is_null()) return fallback;
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + "." + key + " has the wrong type");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const auto* k : known) ok = ok || key == k;
    if (!ok) throw Error(ErrorCode::kInvalidConfig, std::string(what) + ": unknown key '" + key + "'");
  }
}

std::string default_domain(const std::string& dataset) {
  if (dataset == "abcd") return "abcd";
  if (dataset == "multiwoz") return "multiwoz_modified";
  return "";
}

CorpusSource source_from_json(const json& j, const char* what) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, std::string(what) + " must be an object");
  reject_unknown(j, {"dataset", "path", "split", "domain", "utterances", "strict", "include_values"}, what);
  CorpusSource s;
  s.dataset = get_or<std::string>(j, "dataset", "", what);
  if (s.dataset != "abcd" && s.dataset != "multiwoz" && s.dataset != "jsonl")
    throw Error(ErrorCode::kInvalidConfig, std::string(what) + ".dataset must be abcd, multiwoz or jsonl");
  s.path = get_or<std::string>(j, "path", "", what);
  if (s.path.empty()) throw Error(ErrorCode::kInvalidConfig, std::string(what) + ".path is required");
  s.split = parse_split(get_or<std::string>(j, "split", "test", what));
  s.domain = get_or<std::string>(j, "domain", default_domain(s.dataset), what);
  s.utterances = get_or<std::string>(j, "utterances", "", what);
  s.strict = get_or<bool>(j, "strict", false, what);
  s.include_values = get_or<bool>(j, "include_values", false, what);
  return s;
}

json to_json(const CorpusSource& s) {
  return {{"dataset", s.dataset}, {"path", s.path},       {"split", std::string(to_string(s.split))},
          {"domain", s.domain},   {"utterances", s.utterances}, {"strict", s.strict},
          {"include_values", s.include_values}};
}

CastConfig cast_from_json(const json& j) {
  CastConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "cast must be an object");
  reject_unknown(j, {"include_domain", "shuffle_seed", "use_names", "include_values", "prefixes"}, "cast");
  c.include_domain = get_or<bool>(j, "include_domain", false, "cast");
  if (const auto& seed = field(j, "shuffle_seed"); !seed.is_null()) {
    if (!seed.is_number_unsigned()) throw Error(ErrorCode::kInvalidConfig, "cast.shuffle_seed must be a non-negative integer");
    c.shuffle_seed = seed.get<std::uint64_t>();
  }
  c.use_names_not_descriptions = get_or<bool>(j, "use_names", false, "cast");
  c.include_values = get_or<bool>(j, "include_values", true, "cast");
  if (const auto& p = field(j, "prefixes"); !p.is_null()) {
    reject_unknown(p, {"wd_source", "ast_source", "cds_source", "wd_target", "ast_target", "cds_target"}, "cast.prefixes");
    auto& x = c.prefixes;
    x.wd_source = get_or(p, "wd_source", x.wd_source, "cast.prefixes");
    x.ast_source = get_or(p, "ast_source", x.ast_source, "cast.prefixes");
    x.cds_source = get_or(p, "cds_source", x.cds_source, "cast.prefixes");
    x.wd_target = get_or(p, "wd_target", x.wd_target, "cast.prefixes");
    x.ast_target = get_or(p, "ast_target", x.ast_target, "cast.prefixes");
    x.cds_target = get_or(p, "cds_target", x.cds_target, "cast.prefixes");
  }
  return c;
}

json to_json(const CastConfig& c) {
  const auto& x = c.prefixes;
  return {{"include_domain", c.include_domain},
          {"shuffle_seed", c.shuffle_seed ? json(*c.shuffle_seed) : json()},
          {"use_names", c.use_names_not_descriptions},
          {"include_values", c.include_values},
          {"prefixes",
           {{"wd_source", x.wd_source},
            {"ast_source", x.ast_source},
            {"cds_source", x.cds_source},
            {"wd_target", x.wd_target},
            {"ast_target", x.ast_target},
            {"cds_target", x.cds_target}}}};
}

BackendSpec backend_from_json(const json& j) {
  BackendSpec b;
  if (j.is_null()) return b;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "backend must be an object");
  reject_unknown(j, {"kind", "endpoint", "path", "batch_size", "max_in_flight", "timeout_ms", "retries", "backoff_ms",
                     "max_new_units"},
                 "backend");
  b.kind = get_or<std::string>(j, "kind", "oracle", "backend");
  b.endpoint = get_or<std::string>(j, "endpoint", "", "backend");
  b.replay_path = get_or<std::string>(j, "path", "", "backend");
  b.limits.batch_size = get_or<std::size_t>(j, "batch_size", b.limits.batch_size, "backend");
  b.limits.max_in_flight = get_or<std::size_t>(j, "max_in_flight", b.limits.max_in_flight, "backend");
  b.limits.timeout = std::chrono::milliseconds(get_or<long long>(j, "timeout_ms", b.limits.timeout.count(), "backend"));
  b.limits.retries = get_or<int>(j, "retries", b.limits.retries, "backend");
  b.limits.backoff = std::chrono::milliseconds(get_or<long long>(j, "backoff_ms", b.limits.backoff.count(), "backend"));
  b.max_new_units = get_or<int>(j, "max_new_units", 256, "backend");
  if (b.kind == "http" && b.endpoint.empty()) throw Error(ErrorCode::kInvalidConfig, "http backend needs an endpoint");
  if (b.kind == "replay" && b.replay_path.empty()) throw Error(ErrorCode::kInvalidConfig, "replay backend needs a path");
  if (b.kind != "oracle" && b.kind != "http" && b.kind != "replay")
    throw Error(ErrorCode::kInvalidConfig, "backend.kind must be oracle, replay or http");
  if (b.max_new_units < 1 || b.limits.batch_size < 1 || b.limits.max_in_flight < 1 || b.limits.retries < 0)
    throw Error(ErrorCode::kInvalidConfig, "backend limits must be positive");
  return b;
}

json to_json(const BackendSpec& b) {
  json j = {{"kind", b.kind}, {"max_new_units", b.max_new_units}};
  if (b.kind == "http") {
    j["endpoint"] = b.endpoint;
    j["batch_size"] = b.limits.batch_size;
    j["max_in_flight"] = b.limits.max_in_flight;
    j["timeout_ms"] = b.limits.timeout.count();
    j["retries"] = b.limits.retries;
    j["backoff_ms"] = b.limits.backoff.count();
  }
  if (b.kind == "replay") j["path"] = b.replay_path;
  return j;
}

MatchSpec match_from_json(const json& j) {
  MatchSpec m;
  if (j.is_null()) return m;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "match must be an object");
  reject_unknown(j, {"mode", "threshold", "compare_values", "provider"}, "match");
  const auto mode = get_or<std::string>(j, "mode", "stem", "match");
  if (mode == "stem") m.mode = MatchMode::kStemExact;
  else if (mode == "sim") m.mode = MatchMode::kSimilarity;
  else throw Error(ErrorCode::kInvalidConfig, "match.mode must be stem or sim");
  m.threshold = get_or<double>(j, "threshold", 0.95, "match");
  if (!(m.threshold >= 0.0 && m.threshold <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "match.threshold must be in [0, 1]");
  const auto& cv = field(j, "compare_values");
  if (cv.is_boolean()) m.compare_values = cv.get<bool>();
  else if (cv.is_string() && cv == "on") m.compare_values = true;
  else if (cv.is_string() && cv == "off") m.compare_values = false;
  else if (!cv.is_null() && !(cv.is_string() && cv == "auto"))
    throw Error(ErrorCode::kInvalidConfig, "match.compare_values must be on, off or auto");
  m.provider = get_or<std::string>(j, "provider", "", "match");
  return m;
}

json to_json(const MatchSpec& m) {
  return {{"mode", std::string(to_string(m.mode))},
          {"threshold", m.threshold},
          {"compare_values", m.compare_values ? json(*m.compare_values ? "on" : "off") : json("auto")},
          {"provider", m.provider}};
}

}  // namespace

RunManifest manifest_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "manifest must be a JSON object");
  reject_unknown(j, {"task", "train", "eval", "split", "cast", "backend", "match", "output_root", "version"}, "manifest");
  RunManifest m;
  m.base_dir = base_dir;
  m.task = parse_task(get_or<std::string>(j, "task", "", "manifest"));
  if (const auto& t = field(j, "train"); !t.is_null()) m.train = source_from_json(t, "train");
  if (field(j, "eval").is_null()) throw Error(ErrorCode::kInvalidConfig, "manifest needs an eval source");
  m.eval = source_from_json(j["eval"], "eval");
  if (const auto& s = field(j, "split"); !s.is_null()) m.split = split_spec_from_json(s);
  m.cast = cast_from_json(field(j, "cast"));
  m.backend = backend_from_json(field(j, "backend"));
  m.match = match_from_json(field(j, "match"));
  m.output_root = get_or<std::string>(j, "output_root", "runs", "manifest");
  m.version = get_or<std::string>(j, "version", library_version(), "manifest");
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  const auto j = detail::read_json_file(path, ErrorCode::kInvalidConfig);
  return manifest_from_json(j, path.parent_path());
}

json to_json(const RunManifest& m) {
  json j = {{"task", std::string(to_string(m.task))},
            {"eval", to_json(m.eval)},
            {"split", to_json(m.split)},
            {"cast", to_json(m.cast)},
            {"backend", to_json(m.backend)},
            {"match", to_json(m.match)},
            {"output_root", m.output_root},
            {"version", m.version}};
  j["train"] = m.train ? to_json(*m.train) : json();
  return j;
}

std::string manifest_hash(const RunManifest& m) { return text::hex64(text::fnv1a64(to_json(m).dump())); }

std::filesystem::path resolve_path(const RunManifest& m, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || m.base_dir.empty() ? path : m.base_dir / path;
}

std::filesystem::path run_directory(const RunManifest& m) { return resolve_path(m, m.output_root) / manifest_hash(m); }

Corpus load_source(const CorpusSource& src, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  LoadOptions opts;
  opts.strict = src.strict;
  opts.include_values = src.include_values;
  if (!src.utterances.empty()) opts.utterances_path = resolve(src.utterances);
  if (src.dataset == "abcd") {
    if (!src.domain.empty() && src.domain != "abcd")
      throw Error(ErrorCode::kInvalidConfig, "abcd corpora use the 'abcd' domain");
    return load_abcd(resolve(src.path), src.split, opts);
  }
  if (src.dataset == "multiwoz") {
    if (!src.domain.empty()) opts.multiwoz_domain = src.domain;
    return load_multiwoz(resolve(src.path), src.split, opts);
  }
  std::optional<StepDomain> fallback;
  if (!src.domain.empty()) fallback = builtin_domain(src.domain);
  return read_corpus(resolve(src.path), fallback, src.split);
}

MatchConfig make_match_config(const MatchSpec& spec, Task task, const std::string& eval_domain_tag) {
  MatchConfig cfg;
  cfg.mode = spec.mode;
  cfg.threshold = spec.threshold;
  cfg.compare_values = spec.compare_values.value_or(task == Task::kWD && eval_domain_tag == "abcd");
  if (spec.mode == MatchMode::kSimilarity) {
    if (spec.provider.empty())
      throw Error(ErrorCode::kInvalidConfig, "similarity matching needs a provider ('lexical' or an endpoint)");
    cfg.provider = spec.provider == "lexical" ? lexical_provider() : remote_provider(spec.provider);
  }
  return cfg;
}

std::unique_ptr<GenerationBackend> make_backend(const RunManifest& m, const std::vector<CastSample>& eval_samples) {
  if (m.backend.kind == "http") return std::make_unique<HttpBackend>(m.backend.endpoint, m.backend.limits);
  if (m.backend.kind == "replay") return std::make_unique<ReplayBackend>(resolve_path(m, m.backend.replay_path));
  return std::make_unique<OracleBackend>(OracleBackend::from_samples(eval_samples));
}

ExperimentResult run_manifest(const RunManifest& m) {
  const auto dir = run_directory(m);
  const auto hash = manifest_hash(m);

  ExperimentInputs in;
  in.task = m.task;
  in.split = m.split;
  in.cast = m.cast;
  in.max_new_units = m.backend.max_new_units;
  if (std::filesystem::exists(dir / "report.json")) {
    OracleBackend unused({});
    return run_experiment(in, unused, dir);
  }

  in.eval = load_source(m.eval, m.base_dir);
  if (m.train) in.train = load_source(*m.train, m.base_dir);
  in.match = make_match_config(m.match, m.task, in.eval.domain.dataset_tag());
  in.meta.domain_tag = in.eval.domain.dataset_tag();
  in.meta.include_domain = m.cast.include_domain;
  in.meta.use_names = m.cast.use_names_not_descriptions;
  in.meta.include_values = m.cast.include_values;
  in.meta.shuffle_seed = m.cast.shuffle_seed;
  if (const auto* f = std::get_if<FewShot>(&m.split)) in.meta.sample_seed = f->seed;
  in.meta.manifest_hash = hash;
  in.meta.extra["split"] = to_json(m.split);

  detail::write_file(dir / "manifest.json", to_json(m).dump(2) + "\n");
  std::vector<CastSample> oracle_samples;
  if (m.backend.kind == "oracle") oracle_samples = cast_corpus(in.eval, m.task, m.cast).samples;
  auto backend = make_backend(m, oracle_samples);
  return run_experiment(in, *backend, dir);
}

}  // namespace wdflow
