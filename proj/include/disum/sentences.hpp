#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace disum {

// Collapses runs of whitespace to single spaces and trims the ends.
std::string normalize_whitespace(std::string_view text);

// Rule-based sentence splitter for abstracts.  Whitespace is normalized
// first; joining the result with single spaces reconstructs exactly the
// normalized input, so no characters are ever lost or invented.
//
// A '.', '!' or '?' ends a sentence when it sits outside parentheses
// and brackets, is not part of a known abbreviation ("e.g.", "et al.",
// "Fig.", ...) or a dotted initial ("J.", "J.K."), and the next word
// starts with an uppercase letter, a digit, or opening punctuation.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace disum
