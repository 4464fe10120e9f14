#include "symgauntlet/genprops.hpp"

#include <numeric>
#include <stdexcept>

#include "symgauntlet/errors.hpp"

namespace symgauntlet::genprops {

namespace {

void check_length(std::size_t n, std::size_t minimum) {
  if (n < minimum) {
    throw std::invalid_argument("length " + std::to_string(n) +
                                " below minimum " + std::to_string(minimum));
  }
  if (n > kMaxLength) {
    throw std::invalid_argument("length " + std::to_string(n) +
                                " exceeds cap " + std::to_string(kMaxLength));
  }
}

std::uint64_t derive_case_seed(std::uint64_t seed, TestFamily family,
                               const std::string& variant, std::size_t n) {
  std::uint64_t h = fnv1a64(to_string(family));
  h = fnv1a64(variant, h);
  h = fnv1a64(std::to_string(n), h);
  return mix_seed(seed, h);
}

}  // namespace

const char* to_string(TestFamily family) {
  switch (family) {
    case TestFamily::Closure:
      return "closure";
    case TestFamily::Identity:
      return "identity";
    case TestFamily::Inverse:
      return "inverse";
    case TestFamily::Associativity:
      return "associativity";
    case TestFamily::WordCount:
      return "wordcount";
  }
  return "unknown";
}

Fraction Fraction::parse(const std::string& text) {
  auto digits_of = [&text](const std::string& part) -> std::int64_t {
    if (part.empty() ||
        part.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("bad ratio: " + text);
    }
    return std::stoll(part);
  };
  if (text.empty()) throw std::invalid_argument("empty ratio");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::int64_t num = digits_of(text.substr(0, slash));
    const std::int64_t den = digits_of(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: " + text);
    return Fraction{num, den}.normalized();
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) {
    return Fraction{digits_of(text), 1};
  }
  const std::string whole = dot == 0 ? "0" : text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.empty()) return Fraction{digits_of(whole), 1};
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::int64_t num = digits_of(whole) * den + digits_of(frac);
  return Fraction{num, den}.normalized();
}

Fraction Fraction::normalized() const {
  const std::int64_t g = std::gcd(num, den);
  if (g == 0) return Fraction{0, 1};
  return Fraction{num / g, den / g};
}

std::string Fraction::label() const {
  const Fraction f = normalized();
  std::int64_t scaled = f.num;
  std::int64_t rest = f.den;
  int digits = 0;
  while (rest > 1 && digits < 9) {
    scaled *= 10;
    ++digits;
    const std::int64_t g = std::gcd(scaled, rest);
    scaled /= g;
    rest /= g;
  }
  if (rest != 1) {
    return std::to_string(f.num) + "/" + std::to_string(f.den);
  }
  if (digits == 0) return std::to_string(scaled);
  std::string body = std::to_string(scaled);
  while (static_cast<int>(body.size()) <= digits) body.insert(0, "0");
  body.insert(body.size() - digits, ".");
  while (body.back() == '0') body.pop_back();
  if (body.back() == '.') body.pop_back();
  return body;
}

std::string instantiate_final(const std::string& final_template,
                              const std::string& a, const std::string& b) {
  std::string out = final_template;
  const auto pa = out.find("{a}");
  if (pa == std::string::npos) {
    throw ConfigError("final template is missing the {a} slot");
  }
  out.replace(pa, 3, a);
  const auto pb = out.find("{b}");
  if (pb == std::string::npos) {
    throw ConfigError("final template is missing the {b} slot");
  }
  out.replace(pb, 3, b);
  return out;
}

std::string case_id(TestFamily family, const std::string& variant,
                    std::size_t length, std::uint64_t gen_seed) {
  return std::string(to_string(family)) + ":" + variant + ":L" +
         std::to_string(length) + ":s" + std::to_string(gen_seed);
}

std::vector<TestCase> gen_closure(const std::vector<std::size_t>& lengths,
                                  const algebra::PromptTemplate& tmpl) {
  std::vector<TestCase> cases;
  cases.reserve(lengths.size());
  for (std::size_t n : lengths) {
    check_length(n, 1);
    const auto expr = algebra::Expression::ones(n);
    TestCase tc;
    tc.family = TestFamily::Closure;
    tc.length = n;
    tc.variant = "plain";
    tc.prompts = {algebra::render(expr, tmpl)};
    tc.expected = static_cast<std::int64_t>(n);
    tc.gen_seed = 0;
    tc.id = case_id(tc.family, tc.variant, n, tc.gen_seed);
    cases.push_back(std::move(tc));
  }
  return cases;
}

std::vector<TestCase> gen_identity(const std::vector<std::size_t>& lengths,
                                   const std::vector<Fraction>& ratios,
                                   const std::vector<algebra::SymmetryKind>& variants,
                                   std::uint64_t seed,
                                   const algebra::PromptTemplate& tmpl) {
  if (ratios.empty()) throw std::invalid_argument("no identity ratios given");
  if (variants.empty()) throw std::invalid_argument("no symmetry variants given");
  std::vector<TestCase> cases;
  for (std::size_t n : lengths) {
    check_length(n, 1);
    for (const Fraction& ratio : ratios) {
      if (ratio.num <= 0 || ratio.num > ratio.den) {
        throw std::invalid_argument("identity ratio must be in (0,1]: " +
                                    ratio.label());
      }
      const auto zeros = static_cast<std::size_t>(
          std::max<std::int64_t>(1, ratio.floor_mul(static_cast<std::int64_t>(n))));
      for (algebra::SymmetryKind kind : variants) {
        const std::string variant =
            std::string(algebra::to_string(kind)) + "-r" + ratio.label();
        const std::uint64_t case_seed =
            derive_case_seed(seed, TestFamily::Identity, variant, n);
        const auto base =
            algebra::Expression::base_plus_special(n, 1, zeros, 0);
        const auto expr =
            algebra::apply_symmetry(base, n, algebra::SymmetryOp{kind, case_seed});
        TestCase tc;
        tc.family = TestFamily::Identity;
        tc.length = n;
        tc.variant = variant;
        tc.prompts = {algebra::render(expr, tmpl)};
        tc.expected = static_cast<std::int64_t>(n);
        tc.gen_seed = case_seed;
        tc.id = case_id(tc.family, variant, n, case_seed);
        cases.push_back(std::move(tc));
      }
    }
  }
  return cases;
}

std::vector<TestCase> gen_inverse(const std::vector<std::size_t>& lengths,
                                  const std::vector<algebra::SymmetryKind>& variants,
                                  std::uint64_t seed,
                                  const algebra::PromptTemplate& tmpl) {
  if (variants.empty()) throw std::invalid_argument("no symmetry variants given");
  std::vector<TestCase> cases;
  for (std::size_t n : lengths) {
    check_length(n, 1);
    for (algebra::SymmetryKind kind : variants) {
      const std::string variant = algebra::to_string(kind);
      const std::uint64_t case_seed =
          derive_case_seed(seed, TestFamily::Inverse, variant, n);
      const auto base = algebra::Expression::base_plus_special(n, 1, n, -1);
      const auto expr =
          algebra::apply_symmetry(base, n, algebra::SymmetryOp{kind, case_seed});
      TestCase tc;
      tc.family = TestFamily::Inverse;
      tc.length = n;
      tc.variant = variant;
      tc.prompts = {algebra::render(expr, tmpl)};
      tc.expected = 0;
      tc.gen_seed = case_seed;
      tc.id = case_id(tc.family, variant, n, case_seed);
      cases.push_back(std::move(tc));
    }
  }
  return cases;
}

const char* to_string(Split split) {
  return split == Split::Test1 ? "test1" : "test2";
}

Split split_from_string(const std::string& name) {
  if (name == "test1") return Split::Test1;
  if (name == "test2") return Split::Test2;
  throw ConfigError("unknown associativity split: " + name +
                    " (expected test1|test2)");
}

Fraction split_ratio(Split split) {
  return split == Split::Test1 ? Fraction{3, 8} : Fraction{1, 4};
}

std::vector<TestCase> gen_associativity(const std::vector<std::size_t>& lengths,
                                        const std::vector<Split>& splits,
                                        const algebra::PromptTemplate& tmpl) {
  if (splits.empty()) throw std::invalid_argument("no splits given");
  std::vector<TestCase> cases;
  for (std::size_t n : lengths) {
    check_length(n, 2);
    for (Split split : splits) {
      const Fraction r1 = split_ratio(split);
      const auto k1 = static_cast<std::size_t>(
          std::max<std::int64_t>(1, r1.floor_mul(static_cast<std::int64_t>(n))));
      const std::size_t k2 = n - k1;
      TestCase tc;
      tc.family = TestFamily::Associativity;
      tc.length = n;
      tc.variant = to_string(split);
      tc.prompts = {algebra::render(algebra::Expression::ones(k1), tmpl),
                    algebra::render(algebra::Expression::ones(k2), tmpl)};
      tc.final_template = tmpl.instantiate("{a}+{b}");
      tc.expected = static_cast<std::int64_t>(n);
      tc.gen_seed = 0;
      tc.id = case_id(tc.family, tc.variant, n, tc.gen_seed);
      cases.push_back(std::move(tc));
    }
  }
  return cases;
}

const std::vector<std::string>& default_word_items() {
  static const std::vector<std::string> items = {"apples", "oranges", "bananas"};
  return items;
}

const std::vector<CountRange>& default_word_ranges() {
  static const std::vector<CountRange> ranges = {{40, 60}, {90, 110}};
  return ranges;
}

std::string word_count_prompt(const std::string& item, std::int64_t n) {
  std::string list;
  for (std::int64_t i = 0; i < n; ++i) {
    if (i > 0) list += ' ';
    list += item;
  }
  return "How many times does the word \"" + item +
         "\" appear in the following list? " + list;
}

std::vector<TestCase> gen_word_count(const std::vector<std::string>& items,
                                     const std::vector<CountRange>& ranges,
                                     std::uint64_t seed) {
  if (items.empty()) throw std::invalid_argument("no word-count items given");
  std::vector<TestCase> cases;
  for (const std::string& item : items) {
    for (const auto& [lo, hi] : ranges) {
      if (lo < 1 || lo > hi) {
        throw std::invalid_argument("bad count range [" + std::to_string(lo) +
                                    "," + std::to_string(hi) + "]");
      }
      check_length(static_cast<std::size_t>(hi), 1);
      for (std::int64_t n = lo; n <= hi; ++n) {
        const std::string variant =
            item + "-" + std::to_string(lo) + "-" + std::to_string(hi);
        TestCase tc;
        tc.family = TestFamily::WordCount;
        tc.length = static_cast<std::size_t>(n);
        tc.variant = variant;
        tc.prompts = {word_count_prompt(item, n)};
        tc.expected = n;
        tc.gen_seed = mix_seed(seed, fnv1a64(variant));
        tc.id = case_id(tc.family, variant, tc.length, tc.gen_seed);
        cases.push_back(std::move(tc));
      }
    }
  }
  return cases;
}

}  // namespace symgauntlet::genprops
