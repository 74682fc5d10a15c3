#include "wdflow/stepmatch.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "wdflow/error.hpp"
#include "wdflow/stemmer.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

std::vector<std::string> normalize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(porter_stem(current));
    current.clear();
  };
  for (char ch : input) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 'A' && c <= 'Z') {
      current += static_cast<char>(c - 'A' + 'a');
    } else if (c < 0x80 && !std::isalnum(c)) {
      flush();  // whitespace and ASCII punctuation both separate tokens
    } else {
      current += ch;
    }
  }
  flush();
  return tokens;
}

bool values_equal(std::string_view a, std::string_view b) { return text::iequals(text::trim(a), text::trim(b)); }

std::string_view to_string(MatchMode m) { return m == MatchMode::kStemExact ? "stem" : "sim"; }

namespace {

class LexicalProvider final : public SimilarityProvider {
 public:
  std::string name() const override { return "lexical-greedy-f1"; }

  double score(std::string_view a, std::string_view b) const override {
    const auto ta = normalize(a);
    const auto tb = normalize(b);
    if (ta.empty() && tb.empty()) return 1.0;
    if (ta.empty() || tb.empty()) return 0.0;
    const std::unordered_set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
    // With 0/1 token similarity the greedy max per token is plain membership.
    const auto hits = [](const std::vector<std::string>& toks, const std::unordered_set<std::string>& other) {
      return static_cast<double>(std::count_if(toks.begin(), toks.end(), [&](const std::string& t) { return other.count(t) > 0; }));
    };
    const double precision = hits(ta, sb) / static_cast<double>(ta.size());
    const double recall = hits(tb, sa) / static_cast<double>(tb.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
  }
};

}  // namespace

std::shared_ptr<const SimilarityProvider> lexical_provider() {
  static const auto instance = std::make_shared<const LexicalProvider>();
  return instance;
}

bool descriptions_match(std::string_view pred, std::string_view gold, const MatchConfig& cfg) {
  if (cfg.mode == MatchMode::kStemExact) return normalize(pred) == normalize(gold);
  if (!cfg.provider) throw Error(ErrorCode::kProviderUnavailable, "similarity mode without a provider");
  return cfg.provider->score(pred, gold) >= cfg.threshold;
}

bool match_step(const ParsedStep& pred, const ParsedStep& gold, const MatchConfig& cfg) {
  if (!descriptions_match(pred.description, gold.description, cfg)) return false;
  if (!cfg.compare_values) return true;
  if (pred.values.size() < gold.values.size()) return false;
  for (std::size_t i = 0; i < gold.values.size(); ++i)
    if (!values_equal(pred.values[i], gold.values[i])) return false;
  return true;
}

}  // namespace wdflow
