#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "disum/jsonl.hpp"
#include "disum/summary.hpp"

namespace disum {

struct SentenceLabel {
  std::string paper_id;
  std::size_t sentence_index = 0;
  std::string text;
  double p_contribution = 0.0;
  bool is_contribution = false;
};

// Classifier scores for one paper's abstract sentences, keyed by index.
using SentenceScores = std::unordered_map<std::size_t, double>;

struct ScoresFile {
  std::unordered_map<std::string, SentenceScores> by_paper;
  std::vector<LineIssue> issues;
  std::size_t duplicates = 0;  // repeated (paper, index) rows; first one wins
};

ScoresFile load_scores(std::istream& in);

// Labels each sentence as contribution when its score reaches the
// threshold (boundary inclusive).  Every sentence must have a score;
// a missing one raises a validation error naming paper and index.
std::vector<SentenceLabel> label_sentences(const std::string& paper_id,
                                           std::span<const std::string> sentences,
                                           const SentenceScores& scores,
                                           double threshold = 0.5);

// Concatenates each side's sentences with single spaces, preserving
// their original order.  Either side may come out empty.
SummaryPair assemble_references(std::span<const SentenceLabel> labels);

// Splits an abstract and runs the label/assemble pipeline on it.
SummaryPair references_from_abstract(const std::string& paper_id,
                                     const std::string& abstract_text,
                                     const SentenceScores& scores,
                                     double threshold = 0.5);

// Fraction of positions where the two label lists agree.  Lists must
// be non-empty and the same length.
double classifier_accuracy(std::span<const int> predicted,
                           std::span<const int> gold);

// {"paper_id": ..., "labels": [0, 1, ...]} rows.
struct LabelsFile {
  std::unordered_map<std::string, std::vector<int>> by_paper;
  std::vector<LineIssue> issues;
  std::size_t duplicates = 0;
};

LabelsFile load_labels(std::istream& in);

struct AccuracyReport {
  std::size_t papers = 0;     // papers present in both files
  std::size_t sentences = 0;  // total compared positions
  std::size_t matches = 0;
  double accuracy = 0.0;
  std::size_t pred_only = 0;
  std::size_t gold_only = 0;
};

// Compares prediction and gold labels over their common papers.
// Length mismatches raise a validation error naming the paper; an
// empty intersection is an error as well.
AccuracyReport file_accuracy(const LabelsFile& pred, const LabelsFile& gold);

json accuracy_to_json(const AccuracyReport& report);

}  // namespace disum
