#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "disum/jsonl.hpp"
#include "disum/metrics.hpp"
#include "disum/tokenizer.hpp"

namespace disum {

// Tool-wide settings.  Loaded from a JSON file; command-line flags
// override individual values.  Unknown keys are rejected so typos
// cannot silently fall back to defaults.
struct RunConfig {
  TokenizerConfig tokenizer;
  NouveauWeights nouveau = NouveauWeights::defaults();
  std::string citation_ranking = "cited_count";
  std::size_t min_citations = 5;
  std::size_t max_citations = 20;
  double label_threshold = 0.5;
  double low_score_threshold = 20.0;
  double lambda = 0.05;
  unsigned jobs = 0;  // 0 = one worker per hardware thread
};

RunConfig parse_run_config(const json& obj);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace disum
