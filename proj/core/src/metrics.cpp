#include "wdflow/metrics.hpp"

#include <algorithm>
#include <map>

#include "wdflow/error.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

namespace {

template <class A, class B>
void require_aligned(const std::vector<A>& preds, const std::vector<B>& golds) {
  if (preds.size() != golds.size())
    throw Error(ErrorCode::kIdMismatch, std::to_string(preds.size()) + " predictions for " +
                                            std::to_string(golds.size()) + " gold samples");
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].id != golds[i].id)
      throw Error(ErrorCode::kIdMismatch, "position " + std::to_string(i) + ": prediction '" + preds[i].id +
                                              "' vs gold '" + golds[i].id + "'");
}

std::size_t prefix_length(const std::vector<bool>& matches) {
  return static_cast<std::size_t>(std::find(matches.begin(), matches.end(), false) - matches.begin());
}

}  // namespace

std::vector<ParsedStep> gold_steps(const Workflow& workflow, bool use_names) {
  std::vector<ParsedStep> out;
  for (const auto& s : workflow.steps) out.push_back({use_names ? s.name : s.description, s.values});
  return out;
}

Alignment align(const ParsedWD& pred, std::size_t gold_length) {
  Alignment a;
  a.original_length = pred.steps.size();
  for (std::size_t i = 0; i < gold_length; ++i) {
    if (i < pred.steps.size()) a.steps.push_back({pred.steps[i], false});
    else a.steps.push_back({ParsedStep{std::string(kMissingStep), {}}, true});
  }
  return a;
}

std::vector<bool> position_matches(const ParsedWD& pred, std::span<const ParsedStep> gold, const MatchConfig& cfg) {
  const auto aligned = align(pred, gold.size());
  std::vector<bool> out(gold.size(), false);
  for (std::size_t i = 0; i < gold.size(); ++i)
    out[i] = !aligned.steps[i].padded && match_step(aligned.steps[i].step, gold[i], cfg);
  return out;
}

int exact_match(const ParsedWD& pred, std::span<const ParsedStep> gold, const MatchConfig& cfg) {
  if (pred.steps.size() != gold.size()) return 0;
  const auto m = position_matches(pred, gold, cfg);
  return std::all_of(m.begin(), m.end(), [](bool b) { return b; }) ? 1 : 0;
}

double cascading_eval(const ParsedWD& pred, std::span<const ParsedStep> gold, const MatchConfig& cfg) {
  if (gold.empty()) return pred.steps.empty() ? 1.0 : 0.0;
  const auto m = position_matches(pred, gold, cfg);
  return static_cast<double>(prefix_length(m)) / static_cast<double>(gold.size());
}

WDScore wd_score(const std::vector<Keyed<ParsedWD>>& preds, const std::vector<Keyed<std::vector<ParsedStep>>>& golds,
                 const MatchConfig& cfg, std::vector<WDSampleResult>* per_sample) {
  require_aligned(preds, golds);
  if (cfg.mode == MatchMode::kSimilarity && cfg.provider) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& p = preds[i].value.steps;
      const auto& g = golds[i].value;
      for (std::size_t j = 0; j < std::min(p.size(), g.size()); ++j) pairs.emplace_back(p[j].description, g[j].description);
    }
    cfg.provider->prime(pairs);
  }

  WDScore score;
  score.n_samples = preds.size();
  double em_sum = 0.0, ce_sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& pred = preds[i].value;
    const auto& gold = golds[i].value;
    WDSampleResult r;
    r.id = preds[i].id;
    r.pred_length = pred.steps.size();
    r.gold_length = gold.size();
    if (gold.empty()) {
      r.exact_match = pred.steps.empty() ? 1 : 0;
      r.cascading = r.exact_match;
    } else {
      const auto m = position_matches(pred, gold, cfg);
      r.correct_prefix = prefix_length(m);
      r.cascading = static_cast<double>(r.correct_prefix) / static_cast<double>(gold.size());
      r.exact_match = (r.pred_length == r.gold_length && r.correct_prefix == gold.size()) ? 1 : 0;
    }
    if (!r.exact_match) {
      if (r.pred_length != r.gold_length) ++score.failure_breakdown.length_mismatch;
      else ++score.failure_breakdown.wrong_step;
    }
    em_sum += r.exact_match;
    ce_sum += r.cascading;
    if (per_sample) per_sample->push_back(std::move(r));
  }
  if (score.n_samples) {
    score.exact_match = em_sum / static_cast<double>(score.n_samples);
    score.cascading = ce_sum / static_cast<double>(score.n_samples);
  }
  return score;
}

bool value_lists_equal(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.size() != gold.size()) return false;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (!values_equal(pred[i], gold[i])) return false;
  return true;
}

ASTScore ast_score(const std::vector<Keyed<ParsedAST>>& preds, const std::vector<Keyed<GoldAction>>& golds,
                   std::vector<ASTSampleResult>* per_sample) {
  require_aligned(preds, golds);
  ASTScore score;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i].value;
    const auto& g = golds[i].value;
    ASTSampleResult r{preds[i].id, text::iequals(text::trim(p.action), text::trim(g.action)),
                      value_lists_equal(p.values, g.values)};
    score.b_slot.add(r.b_slot);
    score.value.add(r.value);
    score.action.add(r.b_slot && r.value);
    if (per_sample) per_sample->push_back(std::move(r));
  }
  return score;
}

CDSScore cds_score(const std::vector<Keyed<ParsedCDS>>& preds, const std::vector<CDSGold>& golds,
                   std::vector<CDSSampleResult>* per_sample) {
  require_aligned(preds, golds);
  CDSScore score;
  // conversation -> (position, correct), in first-seen order
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<std::size_t, bool>>> by_conversation;

  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i].value;
    const auto& g = golds[i];
    const auto& turn = g.turn;
    CDSSampleResult r;
    r.id = g.id;
    r.intent = turn.intent && text::iequals(text::trim(p.intent), text::trim(*turn.intent));
    r.nextstep = turn.nextstep && text::iequals(text::trim(p.nextstep), to_string(*turn.nextstep));
    score.intent.add(r.intent);
    score.nextstep.add(r.nextstep);
    bool payload_ok = true;
    if (turn.nextstep == NextStep::kTakeAction) {
      const auto action = parse_action(p.payload.value_or(""));
      const bool b_slot = turn.action_name && text::iequals(action.action, text::trim(*turn.action_name));
      const bool value = value_lists_equal(action.values, turn.action_values);
      score.b_slot.add(b_slot);
      score.value.add(value);
      payload_ok = b_slot && value;
    } else if (turn.nextstep == NextStep::kRetrieveUtterance) {
      const bool hit = p.payload && turn.gold_utterance &&
                       text::collapse_whitespace(*p.payload) == text::collapse_whitespace(*turn.gold_utterance);
      score.recall_at_1.add(hit);
      payload_ok = hit;
    }
    r.correct = r.intent && r.nextstep && payload_ok;

    auto [it, inserted] = by_conversation.try_emplace(g.conversation);
    if (inserted) order.push_back(g.conversation);
    it->second.emplace_back(g.position, r.correct);
    if (per_sample) per_sample->push_back(std::move(r));
  }

  double sum = 0.0;
  for (const auto& conv : order) {
    auto turns = by_conversation[conv];
    std::stable_sort(turns.begin(), turns.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t prefix = 0;
    while (prefix < turns.size() && turns[prefix].second) ++prefix;
    sum += static_cast<double>(prefix) / static_cast<double>(turns.size());
  }
  score.n_conversations = order.size();
  if (!order.empty()) score.cascading = sum / static_cast<double>(order.size());
  return score;
}

}  // namespace wdflow
