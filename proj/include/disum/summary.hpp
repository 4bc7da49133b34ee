#pragma once

#include <string>

namespace disum {

// A two-sided summary: what a paper claims to add, and the background
// it builds on.  Either side may legitimately be empty.
struct SummaryPair {
  std::string contribution;
  std::string context;
};

}  // namespace disum
