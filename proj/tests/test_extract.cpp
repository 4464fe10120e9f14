#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "model_transcripts.hpp"
#include "symgauntlet/extract.hpp"

using namespace symgauntlet::extract;

TEST_CASE("small-model transcripts extract their reported totals") {
  CHECK(extract_integer(transcripts::kMistralSamanthaV1).value == 11);
  CHECK(extract_integer(transcripts::kMistralSamanthaV2).value == 11);
  CHECK(extract_integer(transcripts::kMistralEmilyV1).value == 13);
  CHECK(extract_integer(transcripts::kMistralEmilyV2).value == 13);
  CHECK(extract_integer(transcripts::kLlamaSamantha).value == 10);
}

TEST_CASE("marker phrases win over later bare integers") {
  const auto e = extract_integer(transcripts::kMistralSamanthaV2);
  CHECK(e.method == Method::AnswerMarker);
  // Emily V2 states the total up front; the marker still finds it.
  const auto e2 = extract_integer(transcripts::kMistralEmilyV2);
  CHECK(e2.method == Method::AnswerMarker);
}

TEST_CASE("answer-is marker with plain and decorated integers") {
  CHECK(extract_integer("The answer is 5.").value == 5);
  CHECK(extract_integer("The answer is -42.").value == -42);
  CHECK(extract_integer("The answer is 1,234.").value == 1234);
  CHECK(extract_integer("the ANSWER IS 9").value == 9);
}

TEST_CASE("marker must be followed by an integer within the window") {
  // 46 filler characters between the marker and the number: out of range.
  const std::string far =
      "The answer is somewhere beyond this long filler padding text 42";
  const auto e = extract_integer(far);
  CHECK(e.method == Method::LastInteger);
  CHECK(e.value == 42);
}

TEST_CASE("last integer fallback and its known limitation") {
  const auto e = extract_integer("The sum is -3, not 3.");
  // "sum is" is not a pinned marker; the fallback takes the trailing 3.
  CHECK(e.method == Method::LastInteger);
  CHECK(e.value == 3);
}

TEST_CASE("line-leading ordinals are not answers") {
  const auto e = extract_integer("1. first step\n2. second step\nThe answer is 7.");
  CHECK(e.value == 7);
  CHECK(e.method == Method::AnswerMarker);
  // Only ordinals left: nothing extractable.
  const auto none = extract_integer("1. first\n2) second\n");
  CHECK(none.method == Method::None);
  CHECK_FALSE(none.value.has_value());
}

TEST_CASE("empty or numberless responses extract nothing") {
  CHECK(extract_integer("").method == Method::None);
  CHECK(extract_integer("cannot parse").method == Method::None);
  CHECK(extract_integer("no digits at all").method == Method::None);
}

TEST_CASE("digits glued to words are not standalone integers") {
  const auto e = extract_integer("see section A7 and e-5 for details; count 12");
  CHECK(e.value == 12);
}

TEST_CASE("span points at the extracted token") {
  const std::string text = "The answer is 512.";
  const auto e = extract_integer(text);
  REQUIRE(e.value == 512);
  CHECK(text.substr(e.begin, e.end - e.begin) == "512");
}

TEST_CASE("scoring is exact equality and fails missing values") {
  CHECK(score(extract_integer("The answer is 5."), 5));
  CHECK_FALSE(score(extract_integer("makes a total of 11"), 12));
  CHECK_FALSE(score(Extraction{}, 0));
}
