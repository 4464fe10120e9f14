#include "symgauntlet/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "symgauntlet/errors.hpp"

namespace symgauntlet::algebra {

namespace {
constexpr const char* kSlot = "{expr}";
}

Expression::Expression(std::vector<std::int64_t> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw std::invalid_argument("expression must have at least one term");
  }
}

Expression Expression::ones(std::size_t n) {
  return Expression(std::vector<std::int64_t>(n, 1));
}

Expression Expression::base_plus_special(std::size_t n_base, std::int64_t base,
                                         std::size_t n_special,
                                         std::int64_t special) {
  std::vector<std::int64_t> terms;
  terms.reserve(n_base + n_special);
  terms.insert(terms.end(), n_base, base);
  terms.insert(terms.end(), n_special, special);
  return Expression(std::move(terms));
}

const char* to_string(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::AppendAtEnd:
      return "append";
    case SymmetryKind::Reversal:
      return "reversal";
    case SymmetryKind::TranslationToMiddle:
      return "translate";
    case SymmetryKind::RandomSwap:
      return "swap";
  }
  return "unknown";
}

SymmetryKind symmetry_from_string(const std::string& name) {
  if (name == "append") return SymmetryKind::AppendAtEnd;
  if (name == "reversal") return SymmetryKind::Reversal;
  if (name == "translate") return SymmetryKind::TranslationToMiddle;
  if (name == "swap") return SymmetryKind::RandomSwap;
  throw ConfigError("unknown symmetry variant: " + name +
                    " (expected append|reversal|translate|swap)");
}

std::int64_t eval(const Expression& expr) {
  std::int64_t sum = 0;
  for (std::int64_t t : expr.terms()) sum += t;
  return sum;
}

PromptTemplate::PromptTemplate(std::string text) : text_(std::move(text)) {
  const auto first = text_.find(kSlot);
  if (first == std::string::npos) {
    throw ConfigError("prompt template is missing the {expr} slot");
  }
  if (text_.find(kSlot, first + 1) != std::string::npos) {
    throw ConfigError("prompt template has more than one {expr} slot");
  }
  slot_pos_ = first;
}

const PromptTemplate& PromptTemplate::bare() {
  static const PromptTemplate tmpl{kSlot};
  return tmpl;
}

std::string PromptTemplate::instantiate(const std::string& rendered) const {
  std::string out = text_;
  out.replace(slot_pos_, std::char_traits<char>::length(kSlot), rendered);
  return out;
}

std::string render_terms(const Expression& expr) {
  std::string out;
  bool first = true;
  for (std::int64_t t : expr.terms()) {
    if (t < 0) {
      out += '-';
      out += std::to_string(-t);
    } else {
      if (!first) out += '+';
      out += std::to_string(t);
    }
    first = false;
  }
  return out;
}

std::string render(const Expression& expr, const PromptTemplate& tmpl) {
  return tmpl.instantiate(render_terms(expr));
}

Expression parse_terms(const std::string& text) {
  std::vector<std::int64_t> terms;
  std::size_t i = 0;
  while (i < text.size()) {
    std::int64_t sign = 1;
    if (text[i] == '+') {
      if (terms.empty()) {
        throw std::invalid_argument("expression starts with '+': " + text);
      }
      ++i;
    } else if (text[i] == '-') {
      sign = -1;
      ++i;
    }
    const std::size_t digits_begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    if (digits_begin == i) {
      throw std::invalid_argument("expected digits at position " +
                                  std::to_string(i) + " in: " + text);
    }
    terms.push_back(sign *
                    std::stoll(text.substr(digits_begin, i - digits_begin)));
  }
  if (terms.empty()) {
    throw std::invalid_argument("empty expression text");
  }
  return Expression(std::move(terms));
}

Expression apply_symmetry(const Expression& expr, std::size_t base_count,
                          const SymmetryOp& op) {
  const auto& terms = expr.terms();
  if (base_count > terms.size()) {
    throw std::invalid_argument("base_count exceeds expression length");
  }
  const std::size_t special_count = terms.size() - base_count;

  switch (op.kind) {
    case SymmetryKind::AppendAtEnd:
      return expr;

    case SymmetryKind::Reversal: {
      std::vector<std::int64_t> out(terms.rbegin(), terms.rend());
      return Expression(std::move(out));
    }

    case SymmetryKind::TranslationToMiddle: {
      // Special block re-inserted after floor(base_count / 2) base terms.
      const std::size_t cut = base_count / 2;
      std::vector<std::int64_t> out;
      out.reserve(terms.size());
      out.insert(out.end(), terms.begin(), terms.begin() + cut);
      out.insert(out.end(), terms.begin() + base_count, terms.end());
      out.insert(out.end(), terms.begin() + cut, terms.begin() + base_count);
      return Expression(std::move(out));
    }

    case SymmetryKind::RandomSwap: {
      Rng rng(op.seed);
      const auto slots = rng.sample_indices(terms.size(), special_count);
      std::vector<std::int64_t> out(terms.size());
      std::vector<bool> taken(terms.size(), false);
      for (std::size_t k = 0; k < slots.size(); ++k) {
        out[slots[k]] = terms[base_count + k];
        taken[slots[k]] = true;
      }
      std::size_t next_base = 0;
      for (std::size_t pos = 0; pos < out.size(); ++pos) {
        if (!taken[pos]) out[pos] = terms[next_base++];
      }
      return Expression(std::move(out));
    }
  }
  throw std::invalid_argument("unknown symmetry kind");
}

std::map<std::int64_t, std::size_t> multiset(const Expression& expr) {
  std::map<std::int64_t, std::size_t> counts;
  for (std::int64_t t : expr.terms()) ++counts[t];
  return counts;
}

}  // namespace symgauntlet::algebra
