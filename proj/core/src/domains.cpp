#include <set>

#include "wdflow/corpus.hpp"
#include "wdflow/error.hpp"
#include "wdflow/stepmatch.hpp"
#include "wdflow/text.hpp"

namespace wdflow {

namespace {

// ABCD action names with their natural-language descriptions. Spelling
// ("costumer") is kept as published; gold and predictions go through the same
// normalizer so it never affects matching.
const std::vector<DomainEntry>& abcd_entries() {
  static const std::vector<DomainEntry> entries = {
      {"pull-up-account", "pull up the costumer account"},
      {"enter-details", "enter the details"},
      {"verify-identity", "verify costumer identity"},
      {"make-password", "create a new password"},
      {"search-timing", "get arrival date"},
      {"search-policy", "check policy"},
      {"validate-purchase", "validate the purchase"},
      {"search-faq", "search the faq"},
      {"membership", "check membership level"},
      {"search-boots", "search for boots"},
      {"try-again", "ask the costumer to try again"},
      {"ask-the-oracle", "ask the oracle"},
      {"update-order", "update order information"},
      {"promo-code", "offer a promo code"},
      {"update-account", "update costumer account"},
      {"search-membership", "get information about memberships"},
      {"make-purchase", "make a purchase"},
      {"offer-refund", "offer a refund"},
      {"notify-team", "notify team"},
      {"record-reason", "record reason"},
      {"search-jeans", "search for jeans"},
      {"shipping-status", "get the shipping status"},
      {"search-shirt", "search for a shirt"},
      {"instructions", "check the instructions"},
      {"search-jacket", "search for a jacket"},
      {"log-out-in", "ask the costumer to log out then log in"},
      {"select-faq", "select topic in faq"},
      {"subscription-status", "get subscription status"},
      {"send-link", "send a link to the costumer"},
      {"search-pricing", "check pricing"},
  };
  return entries;
}

struct MultiwozRow {
  const char* name;
  const char* original;
  const char* modified;
};

// find_police is named after the dialogue annotations, not the schema ("police").
constexpr MultiwozRow kMultiwozRows[] = {
    {"find_hotel", "search for a hotel to stay in", "search for a hotel"},
    {"book_hotel", "book a hotel to stay in", "book a hotel"},
    {"find_train", "search for trains that take you places", "search for train"},
    {"book_train", "book train tickets", "book train tickets"},
    {"find_attraction", "search for places to see for leisure", "search for attractions"},
    {"find_restaurant", "search for places to wine and dine", "search for a restaurant"},
    {"book_restaurant", "book a table at a restaurant", "book a table at a restaurant"},
    {"find_hospital", "search for a medical facility or a doctor", "search for hospital or a doctor"},
    {"book_taxi", "book taxis to travel between places", "book a taxi"},
    {"find_taxi", "search for a taxi", "search for a taxi"},
    {"find_bus", "search for a bus", "search for a bus"},
    {"find_police", "search for a police station", "search for a police station"},
};

std::vector<DomainEntry> multiwoz_entries(bool modified) {
  std::vector<DomainEntry> out;
  for (const auto& row : kMultiwozRows) out.push_back({row.name, modified ? row.modified : row.original});
  return out;
}

}  // namespace

StepDomain::StepDomain(std::string dataset_tag, std::vector<DomainEntry> entries)
    : dataset_tag_(std::move(dataset_tag)), entries_(std::move(entries)) {
  std::set<std::string> names, descriptions;
  const auto sentinel = normalize(kMissingStep);
  for (const auto& e : entries_) {
    if (e.name.empty() || e.description.empty())
      throw Error(ErrorCode::kInvalidDomain, "empty name or description in domain '" + dataset_tag_ + "'");
    if (!names.insert(e.name).second)
      throw Error(ErrorCode::kInvalidDomain, "duplicate step name '" + e.name + "'");
    const auto stems = normalize(e.description);
    if (!descriptions.insert(text::join(stems, " ")).second)
      throw Error(ErrorCode::kInvalidDomain, "step description '" + e.description + "' duplicates another after normalization");
    if (stems == sentinel)
      throw Error(ErrorCode::kInvalidDomain, "description '" + e.description + "' collides with the padding sentinel");
  }
}

const DomainEntry* StepDomain::find_by_name(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.name == name) return &e;
  return nullptr;
}

StepDomain builtin_domain(std::string_view tag) {
  if (tag == "abcd") return StepDomain("abcd", abcd_entries());
  if (tag == "multiwoz_original") return StepDomain("multiwoz_original", multiwoz_entries(false));
  if (tag == "multiwoz_modified") return StepDomain("multiwoz_modified", multiwoz_entries(true));
  throw Error(ErrorCode::kUnknownDomainTag, std::string(tag));
}

std::vector<std::string> builtin_domain_tags() { return {"abcd", "multiwoz_original", "multiwoz_modified"}; }

}  // namespace wdflow
