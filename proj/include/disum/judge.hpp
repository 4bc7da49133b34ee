#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "disum/jsonl.hpp"

namespace disum {

// One best-worst tuple judgment.
struct BwsRecord {
  std::string annotator_id;
  std::string tuple_id;
  std::string best_model;
  std::string worst_model;
};

// One two-way preference judgment.
struct PreferenceRecord {
  std::string annotator_id;
  std::string sample_id;
  std::string dataset_tag;
  bool chose_disentangled = false;
};

// CSV loaders.  An optional header row matching the column names is
// skipped; otherwise every row must have exactly the expected fields.
// Problems raise validation errors naming the line.
std::vector<BwsRecord> load_bws_csv(std::istream& in);
std::vector<PreferenceRecord> load_preference_csv(std::istream& in);

struct BwsRating {
  std::string model;
  std::size_t best = 0;
  std::size_t worst = 0;
  double rating = 0.0;  // (best - worst) / total records, in [-1, 1]
};

// Best-worst scaling over the declared model set, output in the
// declared order.  Records naming an undeclared model, an empty model
// list or an empty record set raise validation errors.
std::vector<BwsRating> bws_rating(std::span<const BwsRecord> records,
                                  std::span<const std::string> models);

json bws_to_json(std::span<const BwsRating> ratings, std::size_t total_records);

struct PreferenceCell {
  std::string annotator;
  std::size_t chosen = 0;  // judgments preferring the two-sided output
  std::size_t total = 0;
  double percent = 0.0;
};

struct PreferenceDataset {
  std::string dataset;
  std::vector<PreferenceCell> cells;  // sorted by annotator
  double average = 0.0;               // unweighted over present cells
};

struct PreferenceTable {
  std::vector<std::string> annotators;  // sorted, across all datasets
  std::vector<PreferenceDataset> datasets;  // sorted by tag
  std::size_t missing_cells = 0;  // annotator x dataset combos without judgments
};

PreferenceTable preference_table(std::span<const PreferenceRecord> records);

// Full-precision percentages plus display-rounded integers.
json preference_to_json(const PreferenceTable& table);

}  // namespace disum
