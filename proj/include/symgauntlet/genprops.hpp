#pragma once

// Generators for the group-property test families. Every emitted case carries
// an exact expected answer recomputed from the underlying expression, and
// generation is a pure function of (parameters, seed).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symgauntlet/algebra.hpp"

namespace symgauntlet::genprops {

enum class TestFamily : int { Closure, Identity, Inverse, Associativity, WordCount };

const char* to_string(TestFamily family);

/// Exact ratio, kept rational so k = floor(ratio * n) never drifts.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction parse(const std::string& decimal_or_fraction);
  Fraction normalized() const;
  std::int64_t floor_mul(std::int64_t n) const { return num * n / den; }
  /// Minimal decimal form ("0.25", "0.5", "1"), or "num/den" when the
  /// denominator is not a power of ten divisor.
  std::string label() const;
  bool operator==(const Fraction&) const = default;
};

/// Two-segment decomposition of a run of ones, queried in stages.
struct StagePlan {
  std::vector<std::string> stage_prompts;
  std::string final_template;  // two slots: {a} and {b}
};

/// Fills the two slots of a stage-plan final template.
std::string instantiate_final(const std::string& final_template,
                              const std::string& a, const std::string& b);

struct TestCase {
  std::string id;
  TestFamily family = TestFamily::Closure;
  std::size_t length = 0;  // count of base ones (or items for WordCount)
  std::string variant;
  std::vector<std::string> prompts;
  std::optional<std::string> final_template;
  std::int64_t expected = 0;
  std::uint64_t gen_seed = 0;
};

/// Length cap shared by all generators; keeps sums trivially exact.
inline constexpr std::size_t kMaxLength = 10000;

std::vector<TestCase> gen_closure(
    const std::vector<std::size_t>& lengths,
    const algebra::PromptTemplate& tmpl = algebra::PromptTemplate::bare());

std::vector<TestCase> gen_identity(
    const std::vector<std::size_t>& lengths, const std::vector<Fraction>& ratios,
    const std::vector<algebra::SymmetryKind>& variants, std::uint64_t seed,
    const algebra::PromptTemplate& tmpl = algebra::PromptTemplate::bare());

std::vector<TestCase> gen_inverse(
    const std::vector<std::size_t>& lengths,
    const std::vector<algebra::SymmetryKind>& variants, std::uint64_t seed,
    const algebra::PromptTemplate& tmpl = algebra::PromptTemplate::bare());

enum class Split : int { Test1, Test2 };

const char* to_string(Split split);
Split split_from_string(const std::string& name);

/// First-segment ratio of each split: 3/8 for test 1, 1/4 for test 2.
Fraction split_ratio(Split split);

std::vector<TestCase> gen_associativity(
    const std::vector<std::size_t>& lengths, const std::vector<Split>& splits,
    const algebra::PromptTemplate& tmpl = algebra::PromptTemplate::bare());

/// Inclusive integer range of item counts.
using CountRange = std::pair<std::int64_t, std::int64_t>;

const std::vector<std::string>& default_word_items();
const std::vector<CountRange>& default_word_ranges();

/// The pinned counting prompt for one item repeated n times.
std::string word_count_prompt(const std::string& item, std::int64_t n);

std::vector<TestCase> gen_word_count(const std::vector<std::string>& items,
                                     const std::vector<CountRange>& ranges,
                                     std::uint64_t seed);

/// Stable id: family:variant:L<length>:s<seed>; analysis parses these back.
std::string case_id(TestFamily family, const std::string& variant,
                    std::size_t length, std::uint64_t gen_seed);

}  // namespace symgauntlet::genprops
