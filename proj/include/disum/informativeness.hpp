#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "disum/jsonl.hpp"

namespace disum {

enum class SummaryMode { Contribution, Context };

const char* summary_mode_name(SummaryMode mode);

// Log-likelihoods of one generated summary under two conditions: with
// the full source available and with the relevant knowledge withheld.
// Log-probabilities are non-positive by definition.
struct LikelihoodRecord {
  std::string example_id;
  SummaryMode mode = SummaryMode::Contribution;
  double log_p_source = 0.0;
  double log_p_knowledge = 0.0;
};

// How much the withheld knowledge mattered:
//   exp(log_p_source) * (-log_p_knowledge)
// High when the summary is likely given the source yet surprising
// without the knowledge.  Positive log inputs raise a domain error.
double informativeness(const LikelihoodRecord& record);

struct LossConfig {
  double lambda = 0.0;  // weight of the informativeness reward
};

// Cross-entropy minus lambda times the informativeness reward.
double combined_loss(double ce_loss, double inf, const LossConfig& config);

struct ModeStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ScoreSummary {
  ModeStats contribution;
  ModeStats context;
};

// Per-mode informativeness statistics over a batch of records.
ScoreSummary score_records(std::span<const LikelihoodRecord> records);

// A likelihood file starts with a header line declaring how the
// producer normalized its log-probabilities, e.g.
//   {"convention": "per_token"}
// followed by one record per line.  Malformed records are collected
// as per-line issues and skipped.
struct LikelihoodFile {
  std::string convention;  // "sequence" or "per_token"
  std::vector<LikelihoodRecord> records;
  std::vector<LineIssue> issues;
};

LikelihoodFile load_likelihoods(std::istream& in);

json score_summary_to_json(const LikelihoodFile& file, const ScoreSummary& summary);

}  // namespace disum
