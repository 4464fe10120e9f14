#include "symgauntlet/extract.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "symgauntlet/errors.hpp"

namespace symgauntlet::extract {

namespace {

constexpr std::size_t kMarkerWindow = 40;

struct Token {
  std::int64_t value = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

/// True when only horizontal whitespace separates `pos` from the start of
/// its line; list ordinals ("1." / "2)") are only recognized there.
bool at_line_start(const std::string& text, std::size_t pos) {
  while (pos > 0) {
    const char c = text[pos - 1];
    if (c == '\n' || c == '\r') return true;
    if (c != ' ' && c != '\t') return false;
    --pos;
  }
  return true;
}

std::vector<Token> integer_tokens(const std::string& text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i]) &&
        !(text[i] == '-' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (text[i] == '-') ++i;
    // Signs and digits glued to a previous word ("e-5", "x2") are not
    // standalone integers.
    if (begin > 0 && is_alnum(text[begin - 1])) {
      while (i < text.size() && is_digit(text[i])) ++i;
      continue;
    }
    while (i < text.size() && is_digit(text[i])) ++i;
    // Thousands separators: groups of exactly three digits after a comma.
    while (i + 3 < text.size() && text[i] == ',' && is_digit(text[i + 1]) &&
           is_digit(text[i + 2]) && is_digit(text[i + 3]) &&
           (i + 4 >= text.size() || !is_digit(text[i + 4]))) {
      i += 4;
    }
    const std::size_t end = i;
    if (end < text.size() && is_alnum(text[end])) continue;  // "12abc"
    // Enumeration ordinal at the start of a line: "1. first step".
    if (at_line_start(text, begin) && end < text.size() &&
        (text[end] == '.' || text[end] == ')')) {
      continue;
    }
    std::string digits;
    for (std::size_t p = begin; p < end; ++p) {
      if (text[p] != ',') digits += text[p];
    }
    try {
      tokens.push_back(Token{std::stoll(digits), begin, end});
    } catch (const std::out_of_range&) {
      // Too large for int64: not a usable answer token.
    }
  }
  return tokens;
}

std::string lowercase(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::AnswerMarker:
      return "marker";
    case Method::LastInteger:
      return "last_integer";
    case Method::None:
      return "none";
  }
  return "none";
}

Method method_from_string(const std::string& name) {
  if (name == "marker") return Method::AnswerMarker;
  if (name == "last_integer") return Method::LastInteger;
  if (name == "none") return Method::None;
  throw ConfigError("unknown extraction method: " + name);
}

const std::vector<std::string>& marker_phrases() {
  static const std::vector<std::string> markers = {
      "answer is", "total of", "has a total of", "in total", "now has",
  };
  return markers;
}

Extraction extract_integer(const std::string& response) {
  const auto tokens = integer_tokens(response);
  const std::string lowered = lowercase(response);

  // Marker pass: the latest marker occurrence that has an integer starting
  // within the window after it wins.
  bool marker_found = false;
  std::size_t best_marker_pos = 0;
  const Token* best_token = nullptr;
  for (const auto& marker : marker_phrases()) {
    std::size_t pos = lowered.find(marker);
    while (pos != std::string::npos) {
      const std::size_t after = pos + marker.size();
      for (const auto& tok : tokens) {
        if (tok.begin >= after && tok.begin - after <= kMarkerWindow) {
          if (!marker_found || pos >= best_marker_pos) {
            marker_found = true;
            best_marker_pos = pos;
            best_token = &tok;
          }
          break;  // first integer after this occurrence
        }
      }
      pos = lowered.find(marker, pos + 1);
    }
  }
  if (marker_found && best_token != nullptr) {
    return Extraction{best_token->value, Method::AnswerMarker,
                      best_token->begin, best_token->end};
  }

  if (!tokens.empty()) {
    const Token& last = tokens.back();
    return Extraction{last.value, Method::LastInteger, last.begin, last.end};
  }
  return Extraction{};
}

bool score(const Extraction& extraction, std::int64_t expected) {
  return extraction.value.has_value() && *extraction.value == expected;
}

}  // namespace symgauntlet::extract
