#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace disum {

struct TokenizerConfig {
  bool lowercase = true;
  bool stem = false;  // Porter stemming; applies after lowercasing
};

// Splits text into alphanumeric runs.  Punctuation and whitespace act
// as separators; bytes >= 0x80 are kept so multi-byte UTF-8 sequences
// survive intact.  "HVAC-based control" -> ["hvac", "based", "control"].
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config = {});

// Classic Porter stemmer.  Expects a lowercase word.
std::string porter_stem(std::string word);

}  // namespace disum
