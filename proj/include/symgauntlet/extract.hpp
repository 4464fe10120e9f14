#pragma once

// Deterministic recovery of an integer answer from free-form model output,
// plus binary correctness scoring. Marker phrases win over position; when no
// marker is followed by a number, the last standalone integer is taken.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symgauntlet::extract {

enum class Method : int { AnswerMarker, LastInteger, None };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

struct Extraction {
  std::optional<std::int64_t> value;
  Method method = Method::None;
  // Character span of the matched integer token; empty when method == None.
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// The pinned marker phrases, matched case-insensitively; the integer must
/// start within 40 characters after the phrase.
const std::vector<std::string>& marker_phrases();

Extraction extract_integer(const std::string& response);

/// Exact integer equality; a missing value never scores.
bool score(const Extraction& extraction, std::int64_t expected);

}  // namespace symgauntlet::extract
