#include "wdflow/evaluation.hpp"

#include <set>
#include <unordered_map>

#include "wdflow/error.hpp"

namespace wdflow {

GoldSet build_gold(const Corpus& corpus, Task task, bool use_names) {
  CastConfig cfg;
  cfg.use_names_not_descriptions = use_names;
  const auto cast = cast_corpus(corpus, task, cfg);
  std::set<std::string> qualifying;
  for (const auto& s : cast.samples) qualifying.insert(s.id);

  GoldSet g;
  g.task = task;
  for (const auto& d : corpus.dialogues) {
    if (task == Task::kWD) {
      if (!qualifying.count(d.id)) continue;
      g.ids.push_back(d.id);
      g.workflows.push_back(gold_steps(*d.gold_workflow, use_names));
      continue;
    }
    std::size_t position = 0;
    for (const auto& turn : d.gold_turns) {
      const auto id = turn_sample_id(d, turn);
      if (!qualifying.count(id)) continue;
      g.ids.push_back(id);
      if (task == Task::kAST) g.actions.push_back({*turn.action_name, turn.action_values});
      else g.turns.push_back({id, d.id, position++, turn});
    }
  }
  return g;
}

namespace {

void count_flags(std::map<std::string, std::size_t>& counts, unsigned flags) {
  for (const auto& name : parse_flag_names(flags)) ++counts[name];
}

}  // namespace

EvalReport evaluate(const GoldSet& gold, const std::vector<Prediction>& predictions, const MatchConfig& match,
                    const RunMetadata& meta) {
  EvalReport report;
  report.task = gold.task;
  report.match_mode = match.mode;
  report.threshold = match.threshold;
  report.compare_values = match.compare_values;
  report.provider = match.mode == MatchMode::kSimilarity && match.provider ? match.provider->name() : "";
  report.meta = meta;

  std::unordered_map<std::string, const std::string*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p.text;
  const std::set<std::string> gold_ids(gold.ids.begin(), gold.ids.end());
  std::set<std::string> unexpected;
  for (const auto& p : predictions)
    if (!gold_ids.count(p.id)) unexpected.insert(p.id);
  report.unexpected_ids.assign(unexpected.begin(), unexpected.end());

  static const std::string kEmpty;
  std::vector<const std::string*> texts;
  for (const auto& id : gold.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      report.missing_ids.push_back(id);
      texts.push_back(&kEmpty);
    } else {
      texts.push_back(it->second);
    }
  }

  switch (gold.task) {
    case Task::kWD: {
      std::vector<Keyed<ParsedWD>> preds;
      std::vector<Keyed<std::vector<ParsedStep>>> golds;
      for (std::size_t i = 0; i < gold.ids.size(); ++i) {
        preds.push_back({gold.ids[i], parse_wd(*texts[i])});
        count_flags(report.parse_flags, preds.back().value.flags);
        golds.push_back({gold.ids[i], gold.workflows[i]});
      }
      std::vector<WDSampleResult> rows;
      report.wd = wd_score(preds, golds, match, &rows);
      for (const auto& r : rows)
        report.per_sample.push_back({{"id", r.id}, {"em", r.exact_match}, {"ce", r.cascading},
                                     {"pred_length", r.pred_length}, {"gold_length", r.gold_length},
                                     {"correct_prefix", r.correct_prefix}});
      break;
    }
    case Task::kAST: {
      std::vector<Keyed<ParsedAST>> preds;
      std::vector<Keyed<GoldAction>> golds;
      for (std::size_t i = 0; i < gold.ids.size(); ++i) {
        preds.push_back({gold.ids[i], parse_ast(*texts[i])});
        count_flags(report.parse_flags, preds.back().value.flags);
        golds.push_back({gold.ids[i], gold.actions[i]});
      }
      std::vector<ASTSampleResult> rows;
      report.ast = ast_score(preds, golds, &rows);
      for (const auto& r : rows)
        report.per_sample.push_back({{"id", r.id}, {"b_slot", r.b_slot}, {"value", r.value}, {"action", r.b_slot && r.value}});
      break;
    }
    case Task::kCDS: {
      std::vector<Keyed<ParsedCDS>> preds;
      for (std::size_t i = 0; i < gold.ids.size(); ++i) {
        preds.push_back({gold.ids[i], parse_cds(*texts[i])});
        count_flags(report.parse_flags, preds.back().value.flags);
      }
      std::vector<CDSSampleResult> rows;
      report.cds = cds_score(preds, gold.turns, &rows);
      for (const auto& r : rows)
        report.per_sample.push_back({{"id", r.id}, {"intent", r.intent}, {"nextstep", r.nextstep}, {"correct", r.correct}});
      break;
    }
  }
  return report;
}

}  // namespace wdflow
