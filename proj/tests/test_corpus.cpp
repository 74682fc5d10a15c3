#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "wdflow/corpus.hpp"
#include "wdflow/corpus_io.hpp"
#include "wdflow/error.hpp"

namespace wdflow {
namespace {

using testing::TempDir;
using nlohmann::json;

std::vector<std::string> names(const Workflow& wf) {
  std::vector<std::string> out;
  for (const auto& s : wf.steps) out.push_back(s.name);
  return out;
}

const Dialogue& by_id(const Corpus& c, const std::string& id) {
  for (const auto& d : c.dialogues)
    if (d.id == id) return d;
  throw std::runtime_error("no dialogue " + id);
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no wdflow::Error thrown";
  return ErrorCode::kIo;
}

void write_json(const std::filesystem::path& p, const json& j) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << j.dump();
}

json abcd_turn(std::string speaker, std::string text, json targets = nullptr, json candidates = json::array()) {
  return {{"speaker", speaker}, {"text", text}, {"turn_count", 1}, {"targets", targets}, {"candidates", candidates}};
}

TEST(Domains, BuiltinTables) {
  const auto abcd = builtin_domain("abcd");
  EXPECT_EQ(abcd.size(), 30u);
  ASSERT_NE(abcd.find_by_name("promo-code"), nullptr);
  EXPECT_EQ(abcd.find_by_name("promo-code")->description, "offer a promo code");
  EXPECT_EQ(abcd.find_by_name("pull-up-account")->description, "pull up the costumer account");
  EXPECT_EQ(abcd.find_by_name("search-shirt")->description, "search for a shirt");

  const auto orig = builtin_domain("multiwoz_original");
  const auto mod = builtin_domain("multiwoz_modified");
  EXPECT_EQ(orig.size(), 12u);
  EXPECT_EQ(mod.size(), 12u);
  EXPECT_EQ(orig.find_by_name("find_hotel")->description, "search for a hotel to stay in");
  EXPECT_EQ(mod.find_by_name("find_hotel")->description, "search for a hotel");
  EXPECT_TRUE(mod.contains("find_police"));
  EXPECT_EQ(builtin_domain_tags().size(), 3u);
  EXPECT_EQ(code_of([] { builtin_domain("sgd"); }), ErrorCode::kUnknownDomainTag);
}

TEST(Domains, ValidationRejectsCollisions) {
  EXPECT_EQ(code_of([] { StepDomain("x", {{"a", "offer a refund"}, {"a", "check policy"}}); }), ErrorCode::kInvalidDomain);
  EXPECT_EQ(code_of([] { StepDomain("x", {{"a", "offer a refund"}, {"b", "Offering a refund!"}}); }),
            ErrorCode::kInvalidDomain);
  EXPECT_EQ(code_of([] { StepDomain("x", {{"a", "MISSING"}}); }), ErrorCode::kInvalidDomain);
  EXPECT_EQ(code_of([] { StepDomain("x", {{"", "x"}}); }), ErrorCode::kInvalidDomain);
  EXPECT_NO_THROW(StepDomain("x", {{"a", "offer a refund"}, {"b", "offer a promo code"}}));
}

TEST(Splits, Parse) {
  EXPECT_EQ(parse_split("train"), Split::kTrain);
  EXPECT_EQ(parse_split("dev"), Split::kDev);
  EXPECT_EQ(parse_split("validation"), Split::kDev);
  EXPECT_EQ(parse_split("test"), Split::kTest);
  EXPECT_EQ(code_of([] { parse_split("holdout"); }), ErrorCode::kUnknownSplit);
}

TEST(AbcdLoader, FixtureShapes) {
  const auto train = testing::abcd_fixture(Split::kTrain);
  const auto dev = testing::abcd_fixture(Split::kDev);
  const auto test = testing::abcd_fixture(Split::kTest);
  EXPECT_EQ(train.dialogues.size(), 31u);
  EXPECT_EQ(dev.dialogues.size(), 6u);
  EXPECT_EQ(test.dialogues.size(), 10u);
  EXPECT_TRUE(train.diagnostics.empty());
  EXPECT_EQ(train.domain.dataset_tag(), "abcd");
  EXPECT_EQ(train.split, Split::kTrain);
}

TEST(AbcdLoader, WorkflowFollowsActionTurns) {
  const auto train = testing::abcd_fixture(Split::kTrain);
  const auto& d = by_id(train, "1000");
  ASSERT_TRUE(d.gold_workflow);
  EXPECT_EQ(names(*d.gold_workflow), (std::vector<std::string>{"pull-up-account", "validate-purchase", "search-faq"}));
  EXPECT_EQ(d.gold_workflow->steps[0].values, std::vector<std::string>{"Albert sanders"});
  EXPECT_EQ(d.gold_workflow->steps[1].values.size(), 3u);
  EXPECT_TRUE(d.gold_workflow->steps[2].values.empty());
  EXPECT_EQ(d.gold_workflow->steps[0].description, "pull up the costumer account");

  // Duplicate steps are kept in order.
  const auto& jacket = by_id(train, "1005");
  EXPECT_EQ(names(*jacket.gold_workflow), (std::vector<std::string>{"search-faq", "search-jacket", "search-faq"}));
  EXPECT_TRUE(by_id(train, "1900").gold_workflow->empty());
}

TEST(AbcdLoader, GoldTurns) {
  const auto train = testing::abcd_fixture(Split::kTrain);
  const auto& d = by_id(train, "1000");
  ASSERT_FALSE(d.gold_turns.empty());
  const auto& greet = d.gold_turns.front();
  EXPECT_EQ(greet.turn_index, 1u);
  EXPECT_EQ(greet.nextstep, NextStep::kRetrieveUtterance);
  EXPECT_EQ(greet.intent, "manage_dispute_bill");
  EXPECT_EQ(greet.gold_utterance, "hello how can I help you today?");
  EXPECT_EQ(greet.candidate_utterances.size(), 5u);
  EXPECT_FALSE(greet.action_name);

  const auto& last = d.gold_turns.back();
  EXPECT_EQ(last.nextstep, NextStep::kEndConversation);
  EXPECT_EQ(last.turn_index, d.utterances.size() - 1);

  std::size_t actions = 0;
  for (const auto& g : d.gold_turns) {
    if (g.nextstep != NextStep::kTakeAction) continue;
    ++actions;
    EXPECT_EQ(d.utterances[g.turn_index].speaker, Speaker::kAction);
    EXPECT_TRUE(g.action_name);
  }
  EXPECT_EQ(actions, 3u);
}

TEST(AbcdLoader, IntegerCandidatesResolveThroughTable) {
  const auto dev = testing::abcd_fixture(Split::kDev);
  const auto& greet = dev.dialogues.front().gold_turns.front();
  EXPECT_EQ(greet.gold_utterance, "hello how can I help you today?");
  EXPECT_EQ(greet.candidate_utterances.size(), 5u);  // the -1 padding id is skipped
  for (const auto& c : greet.candidate_utterances) EXPECT_FALSE(c.empty());
}

TEST(AbcdLoader, IntegerCandidatesWithoutTableAreMalformed) {
  TempDir tmp;
  write_json(tmp / "c.json",
             {{"train",
               {{{"convo_id", "1"},
                 {"delexed",
                  {abcd_turn("agent", "hello", {"x", "retrieve_utterance", nullptr, json::array(), 0}, {0, 1})}}}}}});
  EXPECT_EQ(code_of([&] { load_abcd(tmp / "c.json", Split::kTrain); }), ErrorCode::kMalformedCorpus);
}

TEST(AbcdLoader, MissingSplitAndBadFiles) {
  TempDir tmp;
  write_json(tmp / "only_train.json", {{"train", json::array()}});
  EXPECT_EQ(code_of([&] { load_abcd(tmp / "only_train.json", Split::kTest); }), ErrorCode::kUnknownSplit);
  EXPECT_EQ(code_of([&] { load_abcd(tmp / "nope.json", Split::kTest); }), ErrorCode::kIo);
  std::ofstream(tmp / "broken.json") << "{\"train\": [";
  EXPECT_EQ(code_of([&] { load_abcd(tmp / "broken.json", Split::kTrain); }), ErrorCode::kMalformedCorpus);
  write_json(tmp / "list.json", json::array());
  EXPECT_EQ(code_of([&] { load_abcd(tmp / "list.json", Split::kTrain); }), ErrorCode::kMalformedCorpus);
}

TEST(AbcdLoader, UnknownNextStepIsMalformed) {
  TempDir tmp;
  write_json(tmp / "c.json",
             {{"test", {{{"convo_id", "1"}, {"delexed", {abcd_turn("agent", "hi", {"x", "dance", nullptr, json::array(), -1})}}}}}});
  EXPECT_EQ(code_of([&] { load_abcd(tmp / "c.json", Split::kTest); }), ErrorCode::kMalformedCorpus);
}

TEST(AbcdLoader, LenientRepairsBecomeStrictViolations) {
  const auto path = testing::fixture("abcd_lenient.json");
  const auto c = load_abcd(path, Split::kTrain);
  ASSERT_EQ(c.dialogues.size(), 1u);
  std::set<std::string> codes;
  for (const auto& d : c.diagnostics) {
    EXPECT_TRUE(d.strict_violation);
    codes.insert(d.code);
  }
  EXPECT_EQ(codes, (std::set<std::string>{"unknown_field", "missing_field", "empty_utterance"}));
  for (const auto& u : c.dialogues[0].utterances) EXPECT_FALSE(u.text.empty());

  LoadOptions strict;
  strict.strict = true;
  try {
    load_abcd(path, Split::kTrain, strict);
    FAIL() << "strict load should fail";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStrictViolation);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("3 violation"), std::string::npos);
    EXPECT_NE(msg.find("scenario_notes"), std::string::npos);
  }
}

TEST(AbcdLoader, StrayActionAndOutOfDomainSteps) {
  TempDir tmp;
  write_json(tmp / "c.json",
             {{"test",
               {{{"convo_id", "7"},
                 {"delexed",
                  {abcd_turn("customer", "help"),
                   abcd_turn("agent", "sure", {"x", "retrieve_utterance", "search-faq", json::array(), 0}, {"sure"}),
                   abcd_turn("action", "did a thing", {"x", "take_action", "teleport-user", {"mars"}, -1})}}}}}});
  const auto c = load_abcd(tmp / "c.json", Split::kTest);
  std::set<std::string> codes;
  for (const auto& d : c.diagnostics) codes.insert(d.code);
  EXPECT_TRUE(codes.count("stray_action"));
  EXPECT_TRUE(codes.count("out_of_domain_step"));
  const auto& wf = *c.dialogues[0].gold_workflow;
  ASSERT_EQ(wf.size(), 1u);
  EXPECT_EQ(wf.steps[0].name, "teleport-user");
  EXPECT_EQ(wf.steps[0].description, "teleport-user");
  EXPECT_FALSE(c.dialogues[0].gold_turns[0].action_name);
}

TEST(AbcdLoader, RetrieveWithoutCandidatesFallsBackToOwnText) {
  TempDir tmp;
  write_json(tmp / "c.json",
             {{"test", {{{"convo_id", "8"},
                         {"delexed", {abcd_turn("agent", "  let me check  ", {"x", "retrieve_utterance", nullptr, json::array(), 3})}}}}}});
  const auto c = load_abcd(tmp / "c.json", Split::kTest);
  const auto& g = c.dialogues[0].gold_turns[0];
  EXPECT_EQ(g.gold_utterance, "let me check");
  EXPECT_EQ(g.candidate_utterances, std::vector<std::string>{"let me check"});
  ASSERT_EQ(c.diagnostics.size(), 1u);
  EXPECT_EQ(c.diagnostics[0].code, "no_candidates");
}

TEST(MultiwozLoader, ActiveIntentRuns) {
  const auto train = testing::multiwoz_fixture(Split::kTrain);
  EXPECT_EQ(train.dialogues.size(), 10u);
  EXPECT_EQ(train.domain.dataset_tag(), "multiwoz_modified");
  EXPECT_EQ(names(*by_id(train, "MUL0001.json").gold_workflow),
            (std::vector<std::string>{"find_restaurant", "book_restaurant"}));
  // Two frames in one turn keep frame order; a continuing intent is one step.
  EXPECT_EQ(names(*by_id(train, "MUL0005.json").gold_workflow),
            (std::vector<std::string>{"find_hotel", "find_restaurant", "book_restaurant"}));
  // Re-activation after a different intent is a new step.
  EXPECT_EQ(names(*by_id(train, "MUL0003.json").gold_workflow),
            (std::vector<std::string>{"find_attraction", "find_restaurant", "find_attraction"}));
  EXPECT_EQ(names(*by_id(train, "SNG0006.json").gold_workflow), std::vector<std::string>{"find_police"});
  EXPECT_TRUE(by_id(train, "SNG0008.json").gold_workflow->empty());

  const auto test = testing::multiwoz_fixture(Split::kTest);
  // A user turn with no active intent ends the run.
  EXPECT_EQ(names(*by_id(test, "MUL0202.json").gold_workflow),
            (std::vector<std::string>{"find_restaurant", "find_restaurant"}));
}

TEST(MultiwozLoader, SlotValuesFromLatestTurnInSlotOrder) {
  const auto train = testing::multiwoz_fixture(Split::kTrain);
  const auto& wf = *by_id(train, "MUL0001.json").gold_workflow;
  EXPECT_EQ(wf.steps[0].values, (std::vector<std::string>{"centre", "italian"}));
  EXPECT_EQ(wf.steps[1].values, (std::vector<std::string>{"friday", "2"}));
  EXPECT_EQ(wf.steps[0].description, "search for a restaurant");

  const auto bare = testing::multiwoz_fixture(Split::kTrain, false);
  for (const auto& d : bare.dialogues)
    for (const auto& s : d.gold_workflow->steps) EXPECT_TRUE(s.values.empty());
}

TEST(MultiwozLoader, DiagnosticsAndSpeakers) {
  const auto train = testing::multiwoz_fixture(Split::kTrain);
  ASSERT_EQ(train.diagnostics.size(), 1u);
  EXPECT_EQ(train.diagnostics[0].code, "empty_workflow");
  EXPECT_FALSE(train.diagnostics[0].strict_violation);
  const auto& d = train.dialogues[0];
  EXPECT_EQ(d.utterances[0].speaker, Speaker::kCustomer);
  EXPECT_EQ(d.utterances[1].speaker, Speaker::kSystem);
  EXPECT_TRUE(d.gold_turns.empty());
}

TEST(MultiwozLoader, OriginalDescriptionsAndPathForms) {
  LoadOptions opts;
  opts.multiwoz_domain = "multiwoz_original";
  const auto c = load_multiwoz(testing::multiwoz_fixture_path() / "dev" / "dialogues_001.json", Split::kDev, opts);
  EXPECT_EQ(c.dialogues.size(), 4u);
  EXPECT_EQ(c.dialogues[0].gold_workflow->steps[0].description, "search for places to wine and dine");

  TempDir flat;
  std::filesystem::copy_file(testing::multiwoz_fixture_path() / "test" / "dialogues_001.json", flat / "a.json");
  std::filesystem::copy_file(testing::multiwoz_fixture_path() / "schema.json", flat / "schema.json");
  EXPECT_EQ(load_multiwoz(flat.path(), Split::kTest).dialogues.size(), 4u);
  EXPECT_EQ(code_of([&] { load_multiwoz(flat / "missing", Split::kTest); }), ErrorCode::kIo);
}

TEST(CorpusJsonl, RoundTrip) {
  TempDir tmp;
  for (const auto& c : {testing::abcd_fixture(Split::kDev), testing::multiwoz_fixture(Split::kTest)}) {
    const auto path = tmp / (c.domain.dataset_tag() + ".jsonl");
    write_corpus(c, path);
    EXPECT_TRUE(std::filesystem::exists(domain_sidecar(path)));
    const auto back = read_corpus(path, std::nullopt, c.split);
    EXPECT_EQ(back.dialogues, c.dialogues);
    EXPECT_EQ(back.domain, c.domain);
  }
}

TEST(CorpusJsonl, RejectsBadTurnIndices) {
  auto d = testing::abcd_fixture(Split::kDev).dialogues[0];
  auto j = to_json(d);
  EXPECT_EQ(dialogue_from_json(j), d);
  j["gold_turns"][0]["turn_index"] = 10000;
  EXPECT_EQ(code_of([&] { dialogue_from_json(j); }), ErrorCode::kMalformedCorpus);
}

TEST(DeriveWorkflow, UsesTakeActionTurnsOnly) {
  const auto domain = builtin_domain("abcd");
  Dialogue d;
  d.id = "x";
  d.utterances = {{Speaker::kAgent, "a"}, {Speaker::kAction, "b"}, {Speaker::kAction, "c"}};
  GoldTurn g0{0, "i", NextStep::kRetrieveUtterance, std::nullopt, {}, {"a"}, "a"};
  GoldTurn g1{1, "i", NextStep::kTakeAction, "offer-refund", {"$5"}, {}, std::nullopt};
  GoldTurn g2{2, "i", NextStep::kTakeAction, "offer-refund", {"$6"}, {}, std::nullopt};
  d.gold_turns = {g0, g1, g2};
  std::vector<Diagnostic> diags;
  const auto wf = derive_workflow(d, domain, &diags);
  ASSERT_EQ(wf.size(), 2u);
  EXPECT_EQ(wf.steps[1].values, std::vector<std::string>{"$6"});
  EXPECT_EQ(wf.steps[0].description, "offer a refund");
  EXPECT_TRUE(diags.empty());
  EXPECT_TRUE(wf.contains("offer-refund"));
  EXPECT_FALSE(wf.contains("promo-code"));
}

}  // namespace
}  // namespace wdflow
