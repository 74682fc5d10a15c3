#pragma once

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wdflow/flowparse.hpp"

namespace wdflow {

// Lowercase, punctuation to spaces, split on whitespace, Porter-stem each token.
// Gold and predicted descriptions must both go through this function.
std::vector<std::string> normalize(std::string_view text);

// Values are entities (names, emails, codes): compared case-insensitively
// after trimming, never stemmed.
bool values_equal(std::string_view a, std::string_view b);

class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;

  virtual std::string name() const = 0;
  // In [0, 1]; score(a, a) == 1 for non-empty a; symmetric.
  virtual double score(std::string_view a, std::string_view b) const = 0;
  // Hint that these pairs are about to be scored; remote providers batch them.
  virtual void prime(std::span<const std::pair<std::string, std::string>> /*pairs*/) const {}
};

// Greedy token matching F1 over stemmed tokens with exact-token similarity.
std::shared_ptr<const SimilarityProvider> lexical_provider();

struct RemoteProviderOptions {
  std::chrono::milliseconds timeout{10000};
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
};

// POST <endpoint>/score {"texts_a": [...], "texts_b": [...]} -> {"scores": [...]}.
// Construction does not contact the service; failures surface on score().
std::shared_ptr<const SimilarityProvider> remote_provider(std::string endpoint, RemoteProviderOptions opts = {});

enum class MatchMode { kStemExact, kSimilarity };

std::string_view to_string(MatchMode m);

struct MatchConfig {
  MatchMode mode = MatchMode::kStemExact;
  double threshold = 0.95;  // Similarity mode only
  bool compare_values = false;
  std::shared_ptr<const SimilarityProvider> provider;
};

bool descriptions_match(std::string_view pred, std::string_view gold, const MatchConfig& cfg);

// Description match plus, with compare_values, every gold value equal to the
// predicted value at the same position. Extra predicted values are ignored.
bool match_step(const ParsedStep& pred, const ParsedStep& gold, const MatchConfig& cfg);

}  // namespace wdflow
