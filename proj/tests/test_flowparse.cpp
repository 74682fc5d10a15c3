#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wdflow/flowparse.hpp"
#include "wdflow/metrics.hpp"
#include "wdflow/taskcast.hpp"

namespace wdflow {
namespace {

bool has(unsigned flags, ParseFlag f) { return (flags & f) != 0; }

TEST(ParseWd, StepsAndValues) {
  const auto p = parse_wd("Flow: pull up the costumer account: Albert sanders,search the faq,validate the purchase: a;b;c");
  ASSERT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(p.steps[0].description, "pull up the costumer account");
  EXPECT_EQ(p.steps[0].values, std::vector<std::string>{"Albert sanders"});
  EXPECT_TRUE(p.steps[1].values.empty());
  EXPECT_EQ(p.steps[2].values, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(p.flags, 0u);
}

TEST(ParseWd, Tolerance) {
  auto p = parse_wd("offer a refund,  , check policy");
  EXPECT_TRUE(has(p.flags, kParseMissingPrefix));
  EXPECT_EQ(p.steps.size(), 2u);

  p = parse_wd("FLOW:   ");
  EXPECT_TRUE(p.steps.empty());
  EXPECT_TRUE(has(p.flags, kParseEmpty));
  EXPECT_FALSE(has(p.flags, kParseMissingPrefix));

  p = parse_wd("Flow: : orphan value,check policy");
  EXPECT_TRUE(has(p.flags, kParseDroppedItem));
  ASSERT_EQ(p.steps.size(), 1u);

  p = parse_wd("Flow: book a taxi: 17:30");
  EXPECT_TRUE(has(p.flags, kParseAmbiguousValues));
  EXPECT_EQ(p.steps[0].values, std::vector<std::string>{"17:30"});

  p = parse_wd("Flow: offer a refund: ;  ; $5 ");
  EXPECT_EQ(p.steps[0].values, std::vector<std::string>{"$5"});
}

TEST(ParseAst, Cases) {
  auto p = parse_ast("AST: validate-purchase:josephbanter975, josephbanter975@gmail.com, 0626252373");
  EXPECT_EQ(p.action, "validate-purchase");
  EXPECT_EQ(p.values, (std::vector<std::string>{"josephbanter975", "josephbanter975@gmail.com", "0626252373"}));
  EXPECT_EQ(p.flags, 0u);

  p = parse_ast("search-faq");
  EXPECT_EQ(p.action, "search-faq");
  EXPECT_TRUE(has(p.flags, kParseMissingPrefix));

  p = parse_ast("AST: :x");
  EXPECT_EQ(p.action, kEmptyActionSentinel);
  EXPECT_TRUE(has(p.flags, kParseEmptyAction));
  EXPECT_EQ(p.values, std::vector<std::string>{"x"});
}

TEST(ParseCds, Cases) {
  auto p = parse_cds("CDS: manage_dispute_bill,take_action,pull-up-account:Albert sanders");
  EXPECT_EQ(p.intent, "manage_dispute_bill");
  EXPECT_EQ(p.nextstep, "take_action");
  EXPECT_EQ(p.payload, "pull-up-account:Albert sanders");
  EXPECT_EQ(p.flags, 0u);

  // The utterance payload may itself contain commas.
  p = parse_cds("CDS: x,retrieve_utterance,sure, one moment, please");
  EXPECT_EQ(p.payload, "sure, one moment, please");

  p = parse_cds("CDS: x,end_conversation");
  EXPECT_FALSE(p.payload);
  EXPECT_EQ(p.flags, 0u);

  p = parse_cds("CDS: x,end_conversation,bye");
  EXPECT_FALSE(p.payload);
  EXPECT_TRUE(has(p.flags, kParseUnexpectedPayload));

  p = parse_cds("CDS: x,take_action");
  EXPECT_EQ(p.payload, "");
  EXPECT_TRUE(has(p.flags, kParseMissingPayload));

  p = parse_cds("nonsense");
  EXPECT_EQ(p.intent, "nonsense");
  EXPECT_EQ(p.payload, "");
  EXPECT_TRUE(has(p.flags, kParseTooFewFields));
  EXPECT_TRUE(has(p.flags, kParseMissingPrefix));

  const auto action = parse_action("pull-up-account:Albert sanders");
  EXPECT_EQ(action.action, "pull-up-account");
  EXPECT_EQ(action.values, std::vector<std::string>{"Albert sanders"});
}

TEST(ParseFlags, Names) {
  EXPECT_EQ(parse_flag_names(kParseEmpty | kParseMissingPrefix), (std::vector<std::string>{"missing_prefix", "empty"}));
  EXPECT_TRUE(parse_flag_names(0).empty());
}

// Random workflows over the builtin domains with delimiter-free values.
TEST(RoundTrip, RandomWorkflowsProperty) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> value_pool = {"Albert sanders", "a@b.com", "$40", "17.30", "centre", "x y z", "2"};
  for (const auto& tag : builtin_domain_tags()) {
    const auto domain = builtin_domain(tag);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<std::pair<std::string, std::vector<std::string>>> steps;
      const auto n = rng() % 7;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> values;
        const auto nv = rng() % 4;
        for (std::size_t k = 0; k < nv; ++k) values.push_back(value_pool[rng() % value_pool.size()]);
        steps.push_back({domain.entries()[rng() % domain.size()].name, values});
      }
      const auto d = testing::make_dialogue("r", steps, domain);
      for (bool names : {false, true}) {
        CastConfig cfg;
        cfg.use_names_not_descriptions = names;
        const auto parsed = parse_wd(cast_wd(d, &domain, cfg).target_text);
        ASSERT_EQ(parsed.steps, gold_steps(*d.gold_workflow, names));
      }
    }
  }
}

}  // namespace
}  // namespace wdflow
