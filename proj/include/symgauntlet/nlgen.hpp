#pragma once

// Natural-language counting scenarios: templated stories whose middle
// sentences each grant exactly one item, plus the transformations probed on
// small models -- middle-sentence permutation, irrelevant-text injection,
// chain-of-thought wrapping, and an advisory omission detector.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "symgauntlet/rng.hpp"

namespace symgauntlet::nlgen {

struct Event {
  std::string text;     // one sentence granting exactly one item
  std::string keyword;  // tag expected to surface in a faithful recap
};

struct Scenario {
  std::string name;
  std::string protagonist;
  std::string item;  // plural noun phrase, e.g. "stuffed animals"
  std::int64_t start_count = 0;
  std::string opening;  // first sentence; states start_count
  std::vector<Event> events;
  // Irrelevant material merged by inject_irrelevant; grants nothing.
  std::vector<std::string> distractors;
  std::string preamble;  // irrelevant paragraph placed before the opening
  std::string question;  // last sentence
};

/// Ground truth: start_count plus one per event, whatever else is mixed in.
std::int64_t expected_answer(const Scenario& s);

/// Number of permutable middle sentences (events plus distractors).
std::size_t middle_size(const Scenario& s);

/// Assembles the full question text with the middle sentences in `order`
/// (a permutation of 0..middle_size-1; events first, then distractors).
/// The opening stays first and the question last by construction.
std::string build_question(const Scenario& s,
                           const std::vector<std::size_t>& order);

/// `count` middle-sentence orderings, deterministic per seed. Orderings are
/// pairwise distinct whenever the permutation space allows it; otherwise
/// duplicates are emitted rather than rejecting forever.
std::vector<std::vector<std::size_t>> permute_middle(const Scenario& s,
                                                     std::uint64_t seed,
                                                     std::size_t count = 5);

struct IrrelevantCorpus {
  std::vector<std::string> preambles;  // whole paragraphs
  std::vector<std::string> sentences;  // standalone distractor sentences
};

/// Rejects entries containing digits or spelled-out small numbers, which
/// could read as counting events. Throws ConfigError on violation.
void validate_corpus(const IrrelevantCorpus& corpus);

enum class InjectMode : int { Preamble, Interleave };

/// Preamble: one seeded corpus paragraph before the opening. Interleave:
/// all corpus sentences merged into the permutable middle. The expected
/// answer is unchanged either way.
Scenario inject_irrelevant(const Scenario& s, const IrrelevantCorpus& corpus,
                           InjectMode mode, std::uint64_t seed);

inline constexpr const char* kCotSuffix = "Let's think step by step.";

/// Appends the chain-of-thought instruction on its own line.
std::string cot_wrap(const std::string& prompt);

/// Indices of events whose keyword never appears (case-insensitively) in the
/// response. Advisory only; never feeds scoring.
std::set<std::size_t> detect_omissions(const std::string& response,
                                       const Scenario& s);

// Canonical built-in scenarios and the matching irrelevant corpus.
Scenario canonical_samantha();
Scenario canonical_emily();
const IrrelevantCorpus& builtin_corpus();
std::vector<Scenario> builtin_scenarios();

// Structured-file loading (schema documented in the README).
std::vector<Scenario> load_scenarios_file(const std::string& path);
IrrelevantCorpus load_corpus_file(const std::string& path);

/// Template engine: a fresh unit-increment scenario from name/item/event
/// pools; used for property sweeps and for authoring starting points.
Scenario make_random_scenario(std::uint64_t seed);

}  // namespace symgauntlet::nlgen
