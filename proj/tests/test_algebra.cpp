#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "symgauntlet/algebra.hpp"
#include "symgauntlet/errors.hpp"

using namespace symgauntlet;
using namespace symgauntlet::algebra;

namespace {

Expression expr(std::vector<std::int64_t> terms) {
  return Expression(std::move(terms));
}

/// Seed pinned by search (scripts/find_pinned_seeds.cpp): scatters the two
/// zeros of 1+1+1+1+1+0+0 to positions 1 and 6.
constexpr std::uint64_t kSwapSeed = 4;

}  // namespace

TEST_CASE("eval sums exactly") {
  CHECK(eval(Expression::ones(5)) == 5);
  CHECK(eval(expr({0})) == 0);
  CHECK(eval(expr({1, 1, -1})) == 1);
  CHECK(eval(Expression::base_plus_special(5, 1, 5, -1)) == 0);
  CHECK(eval(expr({-1, 1, -1, 1, 1, -1, 1, -1, 1, -1})) == 0);
}

TEST_CASE("expressions must be non-empty") {
  CHECK_THROWS_AS(expr({}), std::invalid_argument);
}

TEST_CASE("render joins with plus and absorbs negative signs") {
  CHECK(render_terms(expr({1, 1, 0, 0, 1, 1, 1})) == "1+1+0+0+1+1+1");
  CHECK(render_terms(expr({1, 1, -1})) == "1+1-1");
  CHECK(render_terms(expr({1})) == "1");
  CHECK(render_terms(expr({-2, 3})) == "-2+3");
}

TEST_CASE("render substitutes into the template") {
  const PromptTemplate tmpl("What is {expr}?");
  CHECK(render(Expression::ones(3), tmpl) == "What is 1+1+1?");
  CHECK(render(Expression::ones(1), PromptTemplate::bare()) == "1");
}

TEST_CASE("templates without exactly one slot are rejected") {
  CHECK_THROWS_AS(PromptTemplate("no slot here"), ConfigError);
  CHECK_THROWS_AS(PromptTemplate("{expr} and {expr}"), ConfigError);
}

TEST_CASE("parse_terms inverts render_terms") {
  CHECK(parse_terms("1+1-1").terms() == std::vector<std::int64_t>{1, 1, -1});
  CHECK(parse_terms("-1-1+12").terms() == std::vector<std::int64_t>{-1, -1, 12});
  CHECK(parse_terms("7").terms() == std::vector<std::int64_t>{7});
  CHECK_THROWS_AS(parse_terms(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_terms("+1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_terms("1+"), std::invalid_argument);
  CHECK_THROWS_AS(parse_terms("1++2"), std::invalid_argument);
}

TEST_CASE("render/parse round-trips random expressions") {
  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::int64_t> terms;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t k = 0; k < n; ++k) terms.push_back(rng.between(-9, 9));
    const Expression e(terms);
    CHECK(parse_terms(render_terms(e)) == e);
  }
}

TEST_CASE("append keeps the layout, reversal flips it") {
  const auto base = Expression::base_plus_special(5, 1, 2, 0);
  CHECK(apply_symmetry(base, 5, {SymmetryKind::AppendAtEnd, 0}) == base);
  CHECK(apply_symmetry(base, 5, {SymmetryKind::Reversal, 0}).terms() ==
        std::vector<std::int64_t>{0, 0, 1, 1, 1, 1, 1});
}

TEST_CASE("translation inserts the special block mid-way") {
  const auto base = Expression::base_plus_special(5, 1, 2, 0);
  CHECK(apply_symmetry(base, 5, {SymmetryKind::TranslationToMiddle, 0}).terms() ==
        std::vector<std::int64_t>{1, 1, 0, 0, 1, 1, 1});
  // Even base count splits evenly.
  const auto even = Expression::base_plus_special(4, 1, 2, 0);
  CHECK(apply_symmetry(even, 4, {SymmetryKind::TranslationToMiddle, 0}).terms() ==
        std::vector<std::int64_t>{1, 1, 0, 0, 1, 1});
}

TEST_CASE("random swap reproduces the pinned scatter") {
  const auto base = Expression::base_plus_special(5, 1, 2, 0);
  const auto swapped =
      apply_symmetry(base, 5, {SymmetryKind::RandomSwap, kSwapSeed});
  CHECK(render_terms(swapped) == "1+0+1+1+1+1+0");
  // Same seed, same placement.
  CHECK(apply_symmetry(base, 5, {SymmetryKind::RandomSwap, kSwapSeed}) ==
        swapped);
}

TEST_CASE("base_count beyond the length is rejected") {
  CHECK_THROWS_AS(
      apply_symmetry(Expression::ones(3), 4, {SymmetryKind::Reversal, 0}),
      std::invalid_argument);
}

TEST_CASE("multiset counts terms by value") {
  const auto counts = multiset(expr({1, 0, 1}));
  CHECK(counts.at(1) == 2);
  CHECK(counts.at(0) == 1);
  const auto inverse = multiset(Expression::base_plus_special(5, 1, 5, -1));
  CHECK(inverse.at(1) == 5);
  CHECK(inverse.at(-1) == 5);
  CHECK(inverse.size() == 2);
}

TEST_CASE("group axioms hold for the additive spec") {
  for (std::int64_t x : {-5, -1, 0, 1, 7}) {
    CHECK(GroupSpec::op(x, GroupSpec::identity_element) == x);
    CHECK(GroupSpec::op(GroupSpec::identity_element, x) == x);
    CHECK(GroupSpec::op(x, GroupSpec::inverse_of(x)) ==
          GroupSpec::identity_element);
  }
}

TEST_CASE("every symmetry preserves the sum and the multiset") {
  Rng rng(555);
  const SymmetryKind kinds[] = {SymmetryKind::AppendAtEnd, SymmetryKind::Reversal,
                                SymmetryKind::TranslationToMiddle,
                                SymmetryKind::RandomSwap};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::int64_t> terms;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t k = 0; k < n; ++k) terms.push_back(rng.between(-9, 9));
    const Expression e(terms);
    const std::size_t base = rng.below(n + 1);
    for (SymmetryKind kind : kinds) {
      const auto moved = apply_symmetry(e, base, {kind, rng.next()});
      CHECK(eval(moved) == eval(e));
      CHECK(multiset(moved) == multiset(e));
    }
  }
}

TEST_CASE("reversal is an involution") {
  Rng rng(777);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::int64_t> terms;
    const std::size_t n = 1 + rng.below(30);
    for (std::size_t k = 0; k < n; ++k) terms.push_back(rng.between(-3, 3));
    const Expression e(terms);
    const auto once = apply_symmetry(e, n, {SymmetryKind::Reversal, 0});
    CHECK(apply_symmetry(once, n, {SymmetryKind::Reversal, 0}) == e);
  }
}

TEST_CASE("symmetry names round-trip") {
  for (SymmetryKind kind : {SymmetryKind::AppendAtEnd, SymmetryKind::Reversal,
                            SymmetryKind::TranslationToMiddle,
                            SymmetryKind::RandomSwap}) {
    CHECK(symmetry_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(symmetry_from_string("mirror"), ConfigError);
}
