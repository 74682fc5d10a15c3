#include "wdflow/experiments.hpp"

#include <algorithm>

#include "json_util.hpp"
#include "wdflow/corpus_io.hpp"
#include "wdflow/error.hpp"
#include "wdflow/flowparse.hpp"
#include "wdflow/random.hpp"

namespace wdflow {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

bool mentions(const Dialogue& d, const std::string& step) { return d.gold_workflow && d.gold_workflow->contains(step); }

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty())
    throw Error(ErrorCode::kInvalidConfig, std::string("split spec needs a non-empty string '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

std::string split_kind(const SplitSpec& spec) {
  return std::visit(Overloaded{
                        [](const InDistribution&) { return std::string("in_distribution"); },
                        [](const HoldoutStep&) { return std::string("holdout_step"); },
                        [](const ZeroShot&) { return std::string("zero_shot"); },
                        [](const FewShot&) { return std::string("few_shot"); },
                    },
                    spec);
}

json to_json(const SplitSpec& spec) {
  json j = {{"kind", split_kind(spec)}};
  std::visit(Overloaded{
                 [](const InDistribution&) {},
                 [&](const HoldoutStep& h) {
                   j["step"] = h.step;
                   j["apply_to_dev"] = h.apply_to_dev;
                 },
                 [&](const ZeroShot& z) {
                   j["source"] = z.source;
                   j["target"] = z.target;
                 },
                 [&](const FewShot& f) {
                   j["k"] = f.k;
                   j["seed"] = f.seed;
                 },
             },
             spec);
  return j;
}

SplitSpec split_spec_from_json(const json& j) {
  if (j.is_string()) return split_spec_from_json(json{{"kind", j}});
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "split spec must be an object");
  const auto kind = required_string(j, "kind");
  if (kind == "in_distribution") return InDistribution{};
  if (kind == "holdout_step") return HoldoutStep{required_string(j, "step"), j.value("apply_to_dev", false)};
  if (kind == "zero_shot") return ZeroShot{required_string(j, "source"), required_string(j, "target")};
  if (kind == "few_shot") {
    if (!j.contains("k") || !j["k"].is_number_integer() || j["k"].get<long long>() < 1)
      throw Error(ErrorCode::kInvalidConfig, "few_shot needs an integer k >= 1");
    if (j.contains("seed") && !j["seed"].is_number_unsigned())
      throw Error(ErrorCode::kInvalidConfig, "few_shot seed must be a non-negative integer");
    return FewShot{j["k"].get<int>(), j.value("seed", std::uint64_t{0})};
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown split kind '" + kind + "'");
}

HoldoutResult holdout_step(const Corpus& corpus, const std::string& step) {
  if (!corpus.domain.contains(step))
    throw Error(ErrorCode::kUnknownStep, "'" + step + "' is not in domain '" + corpus.domain.dataset_tag() + "'");
  HoldoutResult r;
  r.train.domain = corpus.domain;
  r.train.split = corpus.split;
  r.train.diagnostics = corpus.diagnostics;
  for (const auto& d : corpus.dialogues) {
    if (mentions(d, step)) {
      ++r.removed;
    } else {
      r.train.dialogues.push_back(d);
      ++r.kept;
    }
  }
  return r;
}

FewShotResult few_shot_sample(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "few-shot k must be >= 1");
  FewShotResult r;
  std::vector<bool> picked(corpus.dialogues.size(), false);
  for (const auto& entry : corpus.domain.entries()) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < corpus.dialogues.size(); ++i)
      if (mentions(corpus.dialogues[i], entry.name)) pool.push_back(i);
    if (pool.empty()) continue;
    auto rng = SeededRng::keyed(seed, entry.name);
    rng.shuffle(pool);
    const auto take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < take; ++i) picked[pool[i]] = true;
    r.coverage.push_back({entry.name, pool.size(), take, 0});
  }
  r.sample.domain = corpus.domain;
  r.sample.split = corpus.split;
  for (std::size_t i = 0; i < corpus.dialogues.size(); ++i)
    if (picked[i]) r.sample.dialogues.push_back(corpus.dialogues[i]);
  for (auto& c : r.coverage)
    c.in_sample = static_cast<std::size_t>(std::count_if(r.sample.dialogues.begin(), r.sample.dialogues.end(),
                                                         [&](const Dialogue& d) { return mentions(d, c.step); }));
  return r;
}

namespace {

struct PreparedSplit {
  std::optional<Corpus> train;
  Corpus eval;
  ordered_json info;
};

PreparedSplit apply_split(const ExperimentInputs& in) {
  PreparedSplit p{in.train, in.eval, ordered_json::object()};
  p.info["kind"] = split_kind(in.split);
  std::visit(Overloaded{
                 [&](const InDistribution&) {},
                 [&](const HoldoutStep& h) {
                   p.info["step"] = h.step;
                   if (p.train) {
                     auto r = holdout_step(*p.train, h.step);
                     p.info["train_removed"] = r.removed;
                     p.info["train_kept"] = r.kept;
                     p.train = std::move(r.train);
                   } else if (!p.eval.domain.contains(h.step)) {
                     throw Error(ErrorCode::kUnknownStep, "'" + h.step + "' is not in the eval domain");
                   }
                   p.info["eval_filtered"] = h.apply_to_dev && p.eval.split == Split::kDev;
                   if (h.apply_to_dev && p.eval.split == Split::kDev) {
                     auto r = holdout_step(p.eval, h.step);
                     p.info["eval_removed"] = r.removed;
                     p.eval = std::move(r.train);
                   }
                 },
                 [&](const ZeroShot& z) {
                   if (p.train && p.train->domain.dataset_tag() != z.source)
                     throw Error(ErrorCode::kInvalidConfig, "train domain is '" + p.train->domain.dataset_tag() +
                                                                "', split expects '" + z.source + "'");
                   if (p.eval.domain.dataset_tag() != z.target)
                     throw Error(ErrorCode::kInvalidConfig, "eval domain is '" + p.eval.domain.dataset_tag() +
                                                                "', split expects '" + z.target + "'");
                   p.info["source"] = z.source;
                   p.info["target"] = z.target;
                 },
                 [&](const FewShot& f) {
                   if (!p.train) throw Error(ErrorCode::kInvalidConfig, "few_shot needs a train corpus");
                   auto r = few_shot_sample(*p.train, f.k, f.seed);
                   p.info["k"] = f.k;
                   p.info["seed"] = f.seed;
                   p.info["sample_size"] = r.sample.dialogues.size();
                   ordered_json cov = ordered_json::array();
                   for (const auto& c : r.coverage)
                     cov.push_back({{"step", c.step}, {"available", c.available}, {"drawn", c.drawn}, {"in_sample", c.in_sample}});
                   p.info["coverage"] = std::move(cov);
                   p.train = std::move(r.sample);
                 },
             },
             in.split);
  if (p.train) p.info["train_dialogues"] = p.train->dialogues.size();
  p.info["eval_dialogues"] = p.eval.dialogues.size();
  return p;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentInputs& in, GenerationBackend& backend,
                                const std::filesystem::path& run_dir) {
  ExperimentResult result;
  result.run_dir = run_dir;
  const auto report_path = run_dir / "report.json";
  if (std::filesystem::exists(report_path)) {
    result.skipped = true;
    result.report = ordered_json::parse(detail::read_file(report_path));
    if (std::filesystem::exists(run_dir / "split_info.json"))
      result.split_info = ordered_json::parse(detail::read_file(run_dir / "split_info.json"));
    return result;
  }

  auto prepared = apply_split(in);
  result.split_info = prepared.info;
  detail::write_file(run_dir / "split_info.json", prepared.info.dump(2) + "\n");

  if (prepared.train) {
    write_corpus(*prepared.train, run_dir / "train_corpus.jsonl");
    write_cast_jsonl(cast_corpus(*prepared.train, in.task, in.cast).samples, run_dir / "train.jsonl");
  }
  const auto eval_cast = cast_corpus(prepared.eval, in.task, in.cast);
  write_cast_jsonl(eval_cast.samples, run_dir / "eval_cast.jsonl");
  if (eval_cast.samples.empty())
    throw Error(ErrorCode::kInvalidConfig, "eval corpus yields no " + std::string(to_string(in.task)) + " samples");

  auto response = backend.generate(make_request(eval_cast.samples, in.max_new_units));
  result.stats = response.stats;
  const auto predictions = to_predictions(response);
  write_predictions_jsonl(predictions, run_dir / "predictions.jsonl");
  const ordered_json generation = {{"backend", backend.name()},
                                   {"samples", predictions.size()},
                                   {"wire_calls", response.stats.wire_calls},
                                   {"retries", response.stats.retries}};
  detail::write_file(run_dir / "generation.json", generation.dump(2) + "\n");

  const auto gold = build_gold(prepared.eval, in.task, in.cast.use_names_not_descriptions);
  auto report = evaluate(gold, predictions, in.match, in.meta);
  write_report(report, run_dir);
  result.report = report_json(report);
  result.evaluation = std::move(report);
  return result;
}

}  // namespace wdflow
