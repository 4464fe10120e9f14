#pragma once

// Exact integer expressions under addition, their rendering to prompt text,
// and the order-preserving/permuting transformations every test family is
// built from. Everything here is pure and deterministic.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symgauntlet/rng.hpp"

namespace symgauntlet::algebra {

/// Ordered, non-empty sequence of integer terms combined by addition.
class Expression {
 public:
  /// Throws std::invalid_argument on an empty term list.
  explicit Expression(std::vector<std::int64_t> terms);

  static Expression ones(std::size_t n);

  /// n_base copies of base followed by n_special copies of special; the
  /// layout every symmetry transformation starts from.
  static Expression base_plus_special(std::size_t n_base, std::int64_t base,
                                      std::size_t n_special,
                                      std::int64_t special);

  const std::vector<std::int64_t>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  bool operator==(const Expression& other) const = default;

 private:
  std::vector<std::int64_t> terms_;
};

/// The additive group the suites probe: identity 0, inverse = negation.
struct GroupSpec {
  static constexpr std::int64_t identity_element = 0;
  static std::int64_t op(std::int64_t a, std::int64_t b) { return a + b; }
  static std::int64_t inverse_of(std::int64_t a) { return -a; }
};

enum class SymmetryKind : int {
  AppendAtEnd,          // special block stays where it was appended
  Reversal,             // whole term sequence reversed
  TranslationToMiddle,  // special block moved to the middle of the base terms
  RandomSwap,           // special terms scattered to seeded random positions
};

struct SymmetryOp {
  SymmetryKind kind = SymmetryKind::AppendAtEnd;
  std::uint64_t seed = 0;  // consumed by RandomSwap only
};

const char* to_string(SymmetryKind kind);

/// Accepts the CLI spellings: append, reversal, translate, swap.
SymmetryKind symmetry_from_string(const std::string& name);

/// Exact integer sum of the terms.
std::int64_t eval(const Expression& expr);

/// Prompt text with exactly one `{expr}` slot.
class PromptTemplate {
 public:
  /// Throws ConfigError unless the text contains the slot exactly once.
  explicit PromptTemplate(std::string text);

  /// The pinned default: the slot alone, so prompts are bare expressions.
  static const PromptTemplate& bare();

  std::string instantiate(const std::string& rendered_expr) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::size_t slot_pos_ = 0;
};

/// Joins terms with '+', absorbing the sign of negative terms: "1+1-1".
std::string render_terms(const Expression& expr);

std::string render(const Expression& expr, const PromptTemplate& tmpl);

/// Inverse of render_terms. Throws std::invalid_argument on malformed text.
Expression parse_terms(const std::string& text);

/// Rearranges an expression laid out as base_count base terms followed by a
/// special block. The multiset of terms is always preserved. Throws
/// std::invalid_argument when base_count exceeds the length.
Expression apply_symmetry(const Expression& expr, std::size_t base_count,
                          const SymmetryOp& op);

/// Term counts by value.
std::map<std::int64_t, std::size_t> multiset(const Expression& expr);

}  // namespace symgauntlet::algebra
