#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disum/jsonl.hpp"
#include "disum/metrics.hpp"

namespace disum {

// One paper's labeled sentence positions.
struct PaperLocations {
  std::size_t sentence_count = 0;
  std::vector<std::size_t> contribution_indices;
};

// Relative-position histogram: sentence j of m lands in bin
// floor(10 * j / m).  fractions[b] is the share of that bin's
// sentences labeled as contributions.
struct LocationHistogram {
  std::array<std::size_t, 10> contribution_counts{};
  std::array<std::size_t, 10> total_counts{};
  std::array<double, 10> fractions{};
  std::size_t papers = 0;
  std::size_t total_sentences = 0;
};

LocationHistogram bin_locations(std::span<const PaperLocations> papers);

json histogram_to_json(const LocationHistogram& histogram);

// Domain tag counts, most frequent first (ties by name); papers
// without tags count under "None".  Every tag of a multi-domain paper
// counts once.
std::vector<std::pair<std::string, std::size_t>> domain_frequency(
    std::span<const std::vector<std::string>> domain_lists, std::size_t top_k = 10);

struct LowScoreRow {
  std::string domain;
  std::size_t below = 0;
  std::size_t total = 0;
  double rate = 0.0;
};

struct LowScoreTable {
  std::string metric;
  double threshold = 0.0;
  std::vector<LowScoreRow> rows;  // sorted by domain name
  std::size_t skipped_missing_metric = 0;
};

// Per-domain share of reports whose selected score falls below the
// threshold.  Reports lacking the score (optional metrics) are skipped
// and counted.
LowScoreTable low_score_rate(std::span<const MetricReport> reports,
                             const MetricSelector& metric, double threshold);

struct LowScoreComparison {
  std::string domain_a, domain_b;
  double rate_a = 0.0, rate_b = 0.0;
  std::optional<double> ratio;  // empty when rate_b is zero
};

// Ratio of two domains' low-score rates.  Unknown domains raise a
// validation error.
LowScoreComparison compare_rates(const LowScoreTable& table,
                                 const std::string& domain_a,
                                 const std::string& domain_b);

json low_score_to_json(const LowScoreTable& table,
                       const std::optional<LowScoreComparison>& comparison);

}  // namespace disum
