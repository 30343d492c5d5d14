#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/fuzz.hpp"
#include "witscript/pipeline.hpp"
#include "witscript/serialize.hpp"

namespace witscript {
namespace {

using testing::default_prompts;
using testing::kWorkedJoke;
using testing::kWorkedPunchline;
using testing::kWorkedTopic;

const char* kArbysTopic =
    "Today the Arby's fast food chain announced the release of a vodka that tastes like their French fries.";

Error error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an Error";
  return Error(ErrorCode::InvalidArgument, "none");
}

ScriptedBackend any_script(std::vector<std::string> responses) {
  std::vector<ScriptEntry> entries;
  for (auto& r : responses) entries.push_back({MatchMode::Any, "", std::move(r)});
  return ScriptedBackend(std::move(entries));
}

struct Harness {
  PipelineConfig config;
  PipelineContext ctx(CompletionBackend& backend) const { return {backend, default_prompts(), config}; }
};

TEST(ValidateTopic, Examples) {
  EXPECT_EQ(validate_topic(kWorkedTopic).text, kWorkedTopic);
  EXPECT_EQ(error_of([] { validate_topic(""); }).code(), ErrorCode::EmptyTopic);
  EXPECT_EQ(error_of([] { validate_topic(std::string(600, 'x')); }).code(), ErrorCode::TopicTooLong);
}

TEST(ParseNumberedList, Examples) {
  EXPECT_EQ(parse_numbered_list("1. F-22 Raptor\n2. cockpit"), (std::vector<std::string>{"F-22 Raptor", "cockpit"}));
  EXPECT_TRUE(parse_numbered_list("").empty());
  EXPECT_EQ(parse_numbered_list("- a\n- a\n- b"), (std::vector<std::string>{"a", "a", "b"}));
}

TEST(ParseNumberedList, OtherShapes) {
  EXPECT_EQ(parse_numbered_list("1) one\n\n  2)two  \n* three\nfour\n3.   \n"),
            (std::vector<std::string>{"one", "two", "three", "four"}));
}

TEST(ParsePunchline, FormatVariants) {
  const auto c = parse_punchline_completion("Here you go:\na: F-22 Raptor | b: \"Swiss chocolate\" | Punchline: Swiss Chocolate F-22s");
  ASSERT_TRUE(c);
  EXPECT_EQ(c->chosen_a, "F-22 Raptor");
  EXPECT_EQ(c->chosen_b, "Swiss chocolate");
  EXPECT_EQ(c->text, "Swiss Chocolate F-22s");
  EXPECT_FALSE(parse_punchline_completion("Swiss Chocolate F-22s"));
  EXPECT_FALSE(parse_punchline_completion("A: x | B: | PUNCHLINE: y"));
}

TEST(ParseRating, FirstStandaloneDigit) {
  EXPECT_EQ(parse_rating_completion("Rating: 3"), 3);
  EXPECT_EQ(parse_rating_completion("4"), 4);
  EXPECT_EQ(parse_rating_completion("10 out of 10, so 2"), 2);
  EXPECT_FALSE(parse_rating_completion("five"));
  EXPECT_FALSE(parse_rating_completion("0 or 7"));
}

TEST(SelectHandles, WorkedExample) {
  Harness h;
  auto backend = any_script({"1. fighter jets\n2. Switzerland"});
  const auto out = select_handles(validate_topic(kWorkedTopic), h.ctx(backend));
  EXPECT_EQ(out.value.first, "fighter jets");
  EXPECT_EQ(out.value.second, "Switzerland");
  EXPECT_EQ(out.record.stage, Stage::HandleSelection);
  EXPECT_EQ(out.record.attempts, 1);
}

TEST(SelectHandles, HandleAbsentFromTopicAfterRetries) {
  Harness h;
  auto backend = any_script({"1. pizza\n2. Switzerland", "1. pizza\n2. Switzerland", "1. pizza\n2. Switzerland"});
  const auto e = error_of([&] { select_handles(validate_topic(kWorkedTopic), h.ctx(backend)); });
  EXPECT_EQ(e.code(), ErrorCode::HandleNotInTopic);
  EXPECT_EQ(e.stage(), Stage::HandleSelection);
  EXPECT_EQ(backend.transcript().size(), 3u);
}

TEST(SelectHandles, RetriesMalformedCompletion) {
  Harness h;
  auto backend = any_script({"no list here", "1. fighter jets\n2. Switzerland"});
  const auto out = select_handles(validate_topic(kWorkedTopic), h.ctx(backend));
  EXPECT_EQ(out.record.attempts, 2);
  EXPECT_EQ(out.record.raw_completion, "1. fighter jets\n2. Switzerland");
}

TEST(SelectHandles, ParseErrorAfterRetries) {
  Harness h;
  h.config.retries_per_stage = 0;
  auto backend = any_script({"1. fighter jets\n2. Switzerland\n3. U.S."});
  EXPECT_EQ(error_of([&] { select_handles(validate_topic(kWorkedTopic), h.ctx(backend)); }).code(),
            ErrorCode::StageParseError);
}

TEST(GenerateAssociations, WorkedExample) {
  Harness h;
  const auto topic = validate_topic(kWorkedTopic);
  auto backend = any_script({"1. F-22 Raptor\n2. cockpit\n3. dogfight", "1. Swiss chocolate\n2. Alps"});
  const auto a = generate_associations("fighter jets", topic, Stage::AssociationsA, h.ctx(backend));
  const auto b = generate_associations("Switzerland", topic, Stage::AssociationsB, h.ctx(backend));
  EXPECT_NE(std::find(a.value.items.begin(), a.value.items.end(), "F-22 Raptor"), a.value.items.end());
  EXPECT_NE(std::find(b.value.items.begin(), b.value.items.end(), "Swiss chocolate"), b.value.items.end());
  EXPECT_EQ(a.record.stage, Stage::AssociationsA);
  EXPECT_EQ(b.record.stage, Stage::AssociationsB);
}

TEST(GenerateAssociations, SelfAssociationOnly) {
  Harness h;
  auto backend = any_script({"1. Switzerland", "1. Switzerland", "1. Switzerland"});
  const auto e = error_of([&] {
    generate_associations("Switzerland", validate_topic(kWorkedTopic), Stage::AssociationsB, h.ctx(backend));
  });
  EXPECT_EQ(e.code(), ErrorCode::StageParseError);
  EXPECT_EQ(e.stage(), Stage::AssociationsB);
  EXPECT_EQ(backend.transcript().size(), 3u);
}

TEST(GenerateAssociations, CapsAtK) {
  Harness h;
  h.config.associations_per_handle = 2;
  auto backend = any_script({"1. a\n2. A\n3. b\n4. c"});
  const auto out = generate_associations("h", validate_topic("a b c h"), Stage::AssociationsA, h.ctx(backend));
  EXPECT_EQ(out.value.items, (std::vector<std::string>{"a", "b"}));
}

TEST(CreatePunchline, WorkedExample) {
  Harness h;
  const AssociationList a{"fighter jets", {"F-22 Raptor", "cockpit"}};
  const AssociationList b{"Switzerland", {"Swiss chocolate", "Alps"}};
  auto backend = any_script({"A: F-22 Raptor | B: Swiss chocolate | PUNCHLINE: Swiss Chocolate F-22s"});
  const auto out = create_punchline(a, b, h.ctx(backend));
  EXPECT_EQ(out.value.text, "Swiss Chocolate F-22s");
  EXPECT_EQ(out.value.chosen_a, "F-22 Raptor");
  EXPECT_EQ(out.value.chosen_b, "Swiss chocolate");
  // Both lists are rendered into the prompt.
  EXPECT_NE(out.record.prompt_text.find("1. F-22 Raptor"), std::string::npos);
  EXPECT_NE(out.record.prompt_text.find("2. Alps"), std::string::npos);
}

TEST(CreatePunchline, ChoiceNotInList) {
  Harness h;
  const AssociationList a{"fighter jets", {"F-22 Raptor"}};
  const AssociationList b{"Switzerland", {"Swiss chocolate"}};
  const std::string bad = "A: F-22 Raptor | B: Alps | PUNCHLINE: Alpine Raptors";
  auto backend = any_script({bad, bad, bad});
  const auto e = error_of([&] { create_punchline(a, b, h.ctx(backend)); });
  EXPECT_EQ(e.code(), ErrorCode::ChosenNotInList);
  EXPECT_EQ(e.stage(), Stage::PunchlineCreation);
}

TEST(CreatePunchline, SingleItemLists) {
  Harness h;
  auto backend = any_script({"A: x | B: y | PUNCHLINE: xy"});
  const auto out = create_punchline({"p", {"x"}}, {"q", {"y"}}, h.ctx(backend));
  EXPECT_EQ(out.value.text, "xy");
  EXPECT_EQ(out.value.chosen_a, "x");
  EXPECT_EQ(out.value.chosen_b, "y");
}

TEST(GenerateAngle, WorkedExampleIsIntact) {
  Harness h;
  auto backend = any_script({kWorkedJoke});
  const auto out = generate_angle(validate_topic(kWorkedTopic),
                                  {kWorkedPunchline, "F-22 Raptor", "Swiss chocolate"}, h.ctx(backend));
  EXPECT_EQ(out.value.joke_text, kWorkedJoke);
  EXPECT_TRUE(out.value.punchline_intact);
}

TEST(GenerateAngle, LenientModeAcceptsReplacedPunchline) {
  Harness h;
  const std::string joke = "The good news is, now you can get drunk and fat at the same time.";
  auto backend = any_script({joke});
  const auto out = generate_angle(validate_topic(kArbysTopic), {"Smirnoff and McDonald's", "Smirnoff", "McDonald's"},
                                  h.ctx(backend));
  EXPECT_EQ(out.value.joke_text, joke);
  EXPECT_FALSE(out.value.punchline_intact);
  EXPECT_EQ(out.record.attempts, 1);
}

TEST(GenerateAngle, StrictModeRejectsReplacedPunchline) {
  Harness h;
  h.config.strict_punchline = true;
  const std::string joke = "The good news is, now you can get drunk and fat at the same time.";
  auto backend = any_script({joke, joke, joke});
  const auto e = error_of([&] {
    generate_angle(validate_topic(kArbysTopic), {"Smirnoff and McDonald's", "Smirnoff", "McDonald's"}, h.ctx(backend));
  });
  EXPECT_EQ(e.code(), ErrorCode::PunchlineDropped);
  EXPECT_EQ(e.stage(), Stage::AngleGeneration);
  EXPECT_EQ(backend.transcript().size(), 3u);
}

TEST(GenerateAngle, EmptyCompletionAfterRetries) {
  Harness h;
  auto backend = any_script({"", " ", "\n"});
  const auto e = error_of([&] {
    generate_angle(validate_topic(kWorkedTopic), {kWorkedPunchline, "a", "b"}, h.ctx(backend));
  });
  EXPECT_EQ(e.code(), ErrorCode::EmptyCompletion);
  EXPECT_EQ(e.stage(), Stage::AngleGeneration);
}

JokeResponse candidate(std::string joke, std::string punch, bool intact) {
  JokeResponse r;
  r.topic = validate_topic("A topic sentence about something.");
  r.punchline = {std::move(punch), "a", "b"};
  r.joke_text = std::move(joke);
  r.punchline_intact = intact;
  return r;
}

TEST(FilterJoke, OffAlwaysAccepts) {
  Harness h;
  ScriptedBackend backend({});
  const auto v = filter_joke(candidate("x", "y", false), h.ctx(backend));
  EXPECT_TRUE(v.accept);
  EXPECT_DOUBLE_EQ(v.score, 1.0);
  EXPECT_FALSE(v.record);
}

TEST(FilterJoke, HeuristicScores) {
  Harness h;
  h.config.filter_policy = FilterPolicy::Heuristic;
  ScriptedBackend backend({});
  // 0.4 + 0.3 + 0.3
  const auto good = filter_joke(candidate("One two three four five six seven punch.", "punch", true), h.ctx(backend));
  EXPECT_TRUE(good.accept);
  EXPECT_DOUBLE_EQ(good.score, 1.0);
  // 0 + 0 (1 token) + 0.3 (differs from topic and punch line)
  const auto poor = filter_joke(candidate("x", "y", false), h.ctx(backend));
  EXPECT_FALSE(poor.accept);
  EXPECT_NEAR(poor.score, 0.3, 1e-12);
  // Joke that is only the punch line: 0.4 + 0 + 0.
  EXPECT_NEAR(heuristic_filter_score(candidate("Punch!", "punch", true)), 0.4, 1e-12);
  // Exactly on the threshold: 0 + 0.3 + 0.3 = 0.6 >= 0.5; 60 tokens is in bounds, 61 is not.
  std::string sixty;
  for (int i = 0; i < 60; ++i) sixty += "w ";
  EXPECT_NEAR(heuristic_filter_score(candidate(sixty, "zz", false)), 0.6, 1e-12);
  EXPECT_NEAR(heuristic_filter_score(candidate(sixty + "w", "zz", false)), 0.3, 1e-12);
}

TEST(FilterJoke, ModelJudged) {
  Harness h;
  h.config.filter_policy = FilterPolicy::ModelJudged;
  auto backend = any_script({"I'd say 3", "Rating: 2"});
  const auto yes = filter_joke(candidate("Some joke text here.", "here", true), h.ctx(backend));
  EXPECT_TRUE(yes.accept);
  ASSERT_TRUE(yes.record);
  EXPECT_EQ(yes.record->stage, Stage::Filter);
  EXPECT_NEAR(yes.score, 2.0 / 3.0, 1e-12);
  const auto no = filter_joke(candidate("Some joke text here.", "here", true), h.ctx(backend));
  EXPECT_FALSE(no.accept);
}

TEST(GenerateJoke, WorkedExampleEndToEnd) {
  ScriptedBackend backend(testing::worked_example_script());
  const auto r = generate_joke(kWorkedTopic, backend, default_prompts(), {});
  EXPECT_EQ(r.handles.first, "fighter jets");
  EXPECT_EQ(r.handles.second, "Switzerland");
  EXPECT_EQ(r.punchline.text, kWorkedPunchline);
  EXPECT_EQ(r.joke_text, kWorkedJoke);
  EXPECT_TRUE(r.punchline_intact);
  ASSERT_EQ(r.trace.size(), 5u);
  EXPECT_EQ(backend.transcript().size(), 5u);
  EXPECT_EQ(backend.remaining(), 0u);
  EXPECT_FALSE(check_invariants(r));
}

TEST(GenerateJoke, EmptyInputMakesNoCalls) {
  ScriptedBackend backend(testing::worked_example_script());
  const auto e = error_of([&] { generate_joke("", backend, default_prompts(), {}); });
  EXPECT_EQ(e.code(), ErrorCode::EmptyTopic);
  EXPECT_FALSE(e.stage());
  EXPECT_TRUE(backend.transcript().empty());
}

TEST(GenerateJoke, TruncatedScriptNamesStage) {
  auto script = testing::worked_example_script();
  script.resize(3);
  ScriptedBackend backend(script);
  const auto e = error_of([&] { generate_joke(kWorkedTopic, backend, default_prompts(), {}); });
  EXPECT_EQ(e.code(), ErrorCode::ScriptExhausted);
  EXPECT_EQ(e.stage(), Stage::PunchlineCreation);
}

TEST(GenerateJoke, ModelJudgedFilterAddsSixthCall) {
  auto script = testing::worked_example_script();
  script.push_back({MatchMode::Substring, "Rating:", "4"});
  ScriptedBackend backend(script);
  PipelineConfig config;
  config.filter_policy = FilterPolicy::ModelJudged;
  const auto r = generate_joke(kWorkedTopic, backend, default_prompts(), config);
  ASSERT_EQ(r.trace.size(), 6u);
  EXPECT_EQ(r.trace.back().stage, Stage::Filter);
  EXPECT_EQ(backend.transcript().size(), 6u);
}

TEST(GenerateJoke, RejectionCarriesCandidate) {
  auto script = testing::worked_example_script();
  script.push_back({MatchMode::Substring, "Rating:", "1"});
  ScriptedBackend backend(script);
  PipelineConfig config;
  config.filter_policy = FilterPolicy::ModelJudged;
  try {
    generate_joke(kWorkedTopic, backend, default_prompts(), config);
    FAIL() << "expected JokeRejected";
  } catch (const JokeRejectedError& e) {
    EXPECT_EQ(e.code(), ErrorCode::JokeRejected);
    EXPECT_EQ(e.stage(), Stage::Filter);
    EXPECT_EQ(e.candidate().joke_text, kWorkedJoke);
    EXPECT_EQ(e.candidate().trace.size(), 6u);
    EXPECT_DOUBLE_EQ(e.score(), 0.0);
  }
}

TEST(GenerateJoke, DeterministicSerialization) {
  auto run = [] {
    ScriptedBackend backend(testing::worked_example_script());
    auto doc = to_json(generate_joke(kWorkedTopic, backend, default_prompts(), {}), true);
    for (auto& rec : doc["trace"]) rec.erase("elapsed_ms");
    return doc.dump();
  };
  EXPECT_EQ(run(), run());
}

TEST(GenerateJoke, RejectsInvalidConfig) {
  ScriptedBackend backend({});
  PipelineConfig config;
  config.associations_per_handle = 11;
  EXPECT_EQ(error_of([&] { generate_joke(kWorkedTopic, backend, default_prompts(), config); }).code(),
            ErrorCode::InvalidArgument);
}

TEST(Serialization, FieldsAndRoundTrip) {
  ScriptedBackend backend(testing::worked_example_script());
  const auto r = generate_joke(kWorkedTopic, backend, default_prompts(), {});
  const auto bare = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : bare.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"associations", "handles", "joke_text", "punchline",
                                            "punchline_intact", "topic"}));
  EXPECT_EQ(bare["associations"].size(), 2u);
  EXPECT_EQ(bare["punchline"]["chosen_b"], "Swiss chocolate");

  const auto full = to_json(r, true);
  ASSERT_EQ(full["trace"].size(), 5u);
  EXPECT_EQ(full["trace"][4]["stage"], "AngleGeneration");
  EXPECT_EQ(to_json(joke_response_from_json(full), true), full);
}

TEST(PipelineFuzz, InvariantsHoldOnRandomScripts) {
  int successes = 0;
  for (std::uint64_t seed = 1; seed <= 600; ++seed) {
    const auto report = testing::run_fuzz_case(seed, default_prompts());
    ASSERT_TRUE(report.passed) << report.detail;
    successes += report.succeeded ? 1 : 0;
  }
  EXPECT_GT(successes, 200);
}

}  // namespace
}  // namespace witscript
