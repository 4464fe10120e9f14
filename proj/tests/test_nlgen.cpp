#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "model_transcripts.hpp"
#include "symgauntlet/errors.hpp"
#include "symgauntlet/nlgen.hpp"

using namespace symgauntlet;
using namespace symgauntlet::nlgen;

namespace {

/// Identity ordering over the middle sentences.
std::vector<std::size_t> identity_order(const Scenario& s) {
  std::vector<std::size_t> order(middle_size(s));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  return order;
}

/// Seed pinned by search (scripts/find_pinned_seeds.cpp): the first
/// permutation reorders the Emily events into the version-2 transcript.
constexpr std::uint64_t kEmilyV2Seed = 1152045;

}  // namespace

TEST_CASE("canonical story reproduces its transcript byte for byte") {
  const auto s = canonical_samantha();
  CHECK(build_question(s, identity_order(s)) == transcripts::kSamanthaV1);
  CHECK(expected_answer(s) == 12);
}

TEST_CASE("pinned seed reproduces the reshuffled transcript") {
  const auto emily = canonical_emily();
  const auto perms = permute_middle(emily, kEmilyV2Seed, 5);
  CHECK(build_question(emily, perms[0]) == transcripts::kEmilyV2);
  CHECK(expected_answer(emily) == 12);
}

TEST_CASE("zero events collapse to opening plus question") {
  Scenario s;
  s.name = "tiny";
  s.protagonist = "Ada";
  s.item = "coins";
  s.start_count = 3;
  s.opening = "Ada has 3 coins.";
  s.question = "How many coins does Ada have now?";
  CHECK(build_question(s, {}) == "Ada has 3 coins. How many coins does Ada have now?");
  CHECK(expected_answer(s) == 3);
}

TEST_CASE("orders must be valid permutations") {
  const auto s = canonical_samantha();
  CHECK_THROWS_AS(build_question(s, {0, 1}), std::invalid_argument);
  auto dup = identity_order(s);
  dup[1] = 0;
  CHECK_THROWS_AS(build_question(s, dup), std::invalid_argument);
}

TEST_CASE("permutations are distinct, seed-stable, and fix the frame") {
  const auto s = canonical_samantha();
  const auto perms = permute_middle(s, 31337, 5);
  REQUIRE(perms.size() == 5);
  std::set<std::vector<std::size_t>> unique(perms.begin(), perms.end());
  CHECK(unique.size() == 5);
  CHECK(permute_middle(s, 31337, 5) == perms);

  const std::string opening = s.opening;
  for (const auto& perm : perms) {
    const auto text = build_question(s, perm);
    CHECK(text.rfind(opening, 0) == 0);
    CHECK(text.substr(text.size() - s.question.size()) == s.question);
  }
}

TEST_CASE("tiny permutation spaces fall back to repeats") {
  Scenario s = canonical_samantha();
  s.events.resize(1);
  const auto perms = permute_middle(s, 5, 5);
  REQUIRE(perms.size() == 5);
  for (const auto& p : perms) CHECK(p == std::vector<std::size_t>{0});
}

TEST_CASE("preamble injection prepends and keeps the answer") {
  const auto s = canonical_samantha();
  const auto injected =
      inject_irrelevant(s, builtin_corpus(), InjectMode::Preamble, 1);
  const auto text = build_question(injected, identity_order(injected));
  CHECK(text.rfind("Samantha is a young girl with a passion", 0) == 0);
  CHECK(text.find(s.opening) != std::string::npos);
  CHECK(expected_answer(injected) == expected_answer(s));
}

TEST_CASE("interleave injection grows the middle but not the answer") {
  const auto s = canonical_emily();
  const auto injected =
      inject_irrelevant(s, builtin_corpus(), InjectMode::Interleave, 2);
  CHECK(middle_size(injected) ==
        middle_size(s) + builtin_corpus().sentences.size());
  CHECK(expected_answer(injected) == expected_answer(s));
  // With no distractor sentences the scenario is unchanged.
  IrrelevantCorpus empty_sentences;
  const auto unchanged =
      inject_irrelevant(s, empty_sentences, InjectMode::Interleave, 0);
  CHECK(middle_size(unchanged) == middle_size(s));
  CHECK(build_question(unchanged, permute_middle(unchanged, 1, 1)[0]) ==
        build_question(s, permute_middle(s, 1, 1)[0]));
  // Preamble mode has nothing sensible to draw from an empty corpus.
  CHECK_THROWS_AS(inject_irrelevant(s, empty_sentences, InjectMode::Preamble, 0),
                  std::invalid_argument);
}

TEST_CASE("corpus validation rejects countable content") {
  IrrelevantCorpus bad;
  bad.sentences = {"She kept 3 of them."};
  CHECK_THROWS_AS(validate_corpus(bad), ConfigError);
  IrrelevantCorpus spelled;
  spelled.sentences = {"She kept one of them."};
  CHECK_THROWS_AS(validate_corpus(spelled), ConfigError);
  IrrelevantCorpus fine;
  fine.sentences = {"The sky stayed clear."};
  CHECK_NOTHROW(validate_corpus(fine));
}

TEST_CASE("cot wrapping appends the pinned suffix") {
  CHECK(cot_wrap("Q?") == "Q?\nLet's think step by step.");
  CHECK(cot_wrap("") == std::string("\n") + kCotSuffix);
  CHECK(cot_wrap(cot_wrap("Q?")) ==
        "Q?\nLet's think step by step.\nLet's think step by step.");
}

TEST_CASE("omission detection flags the skipped events") {
  const auto samantha = canonical_samantha();
  const auto missing = detect_omissions(transcripts::kMistralSamanthaV1, samantha);
  CHECK(missing == std::set<std::size_t>{8});  // the "sister" sentence
  CHECK(samantha.events[8].keyword == "sister");

  const auto emily = canonical_emily();
  const auto missing_emily = detect_omissions(transcripts::kMistralEmilyV1, emily);
  CHECK(missing_emily == std::set<std::size_t>{8});  // the "mom" sentence
  CHECK(emily.events[8].keyword == "mom");
}

TEST_CASE("omission detection extremes") {
  const auto s = canonical_samantha();
  std::string everything;
  for (const auto& e : s.events) everything += e.keyword + " ";
  CHECK(detect_omissions(everything, s).empty());
  std::set<std::size_t> all;
  for (std::size_t i = 0; i < s.events.size(); ++i) all.insert(i);
  CHECK(detect_omissions("", s) == all);
}

TEST_CASE("expected answer is invariant under permutation and injection") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = make_random_scenario(seed);
    const auto expected = expected_answer(s);
    CHECK(expected == s.start_count + static_cast<std::int64_t>(s.events.size()));

    const auto injected =
        inject_irrelevant(s, builtin_corpus(), InjectMode::Interleave, seed);
    CHECK(expected_answer(injected) == expected);
    const auto with_preamble =
        inject_irrelevant(s, builtin_corpus(), InjectMode::Preamble, seed);
    CHECK(expected_answer(with_preamble) == expected);

    for (const auto& perm : permute_middle(injected, seed * 31, 5)) {
      CHECK_NOTHROW(build_question(injected, perm));
    }
  }
}

TEST_CASE("scenario and corpus files load and match the builtins") {
  const auto scenarios =
      load_scenarios_file(std::string(SYMGAUNTLET_DATA_DIR) + "/scenarios.json");
  REQUIRE(scenarios.size() == 2);
  const auto samantha = canonical_samantha();
  CHECK(scenarios[0].name == samantha.name);
  CHECK(scenarios[0].opening == samantha.opening);
  CHECK(scenarios[0].question == samantha.question);
  REQUIRE(scenarios[0].events.size() == samantha.events.size());
  for (std::size_t i = 0; i < samantha.events.size(); ++i) {
    CHECK(scenarios[0].events[i].text == samantha.events[i].text);
    CHECK(scenarios[0].events[i].keyword == samantha.events[i].keyword);
  }
  CHECK(build_question(scenarios[0], identity_order(scenarios[0])) ==
        transcripts::kSamanthaV1);

  const auto emily = canonical_emily();
  CHECK(scenarios[1].name == emily.name);
  CHECK(scenarios[1].opening == emily.opening);

  const auto corpus =
      load_corpus_file(std::string(SYMGAUNTLET_DATA_DIR) + "/irrelevant_corpus.json");
  CHECK(corpus.preambles == builtin_corpus().preambles);
  CHECK(corpus.sentences == builtin_corpus().sentences);
}

TEST_CASE("derived openings fill in when the file omits them") {
  // Emily's file entry carries an explicit opening ("two" spelled out); a
  // minimal entry derives one from protagonist/start/item.
  const auto emily = canonical_emily();
  CHECK(emily.opening == "Emily has two puzzles.");
  const auto generated = make_random_scenario(1);
  CHECK(generated.opening.find(std::to_string(generated.start_count)) !=
        std::string::npos);
}
