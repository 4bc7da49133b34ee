#include "disum/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <span>

namespace disum {

namespace {

std::string trim(const std::string& s) {
  std::size_t start = s.find_first_not_of(" \t");
  if (start == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t");
  return s.substr(start, end - start + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool iequals(const std::string& a, const char* b) {
  std::size_t i = 0;
  for (; i < a.size() && b[i] != '\0'; ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return i == a.size() && b[i] == '\0';
}

// Reads rows of exactly `header` fields, skipping an optional leading
// header row; calls fn(line_no, fields) per data row.
template <typename Fn>
void for_each_csv_row(std::istream& in, std::span<const char* const> header,
                      Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_row(line);
    if (first_row) {
      first_row = false;
      bool is_header = fields.size() == header.size();
      for (std::size_t i = 0; is_header && i < header.size(); ++i) {
        is_header = iequals(fields[i], header[i]);
      }
      if (is_header) continue;
    }
    if (fields.size() != header.size()) {
      throw Error::validation("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) {
        throw Error::validation("line " + std::to_string(line_no) + ": field '" +
                                header[i] + "' is empty");
      }
    }
    fn(line_no, fields);
  }
}

}  // namespace

std::vector<BwsRecord> load_bws_csv(std::istream& in) {
  static constexpr const char* kHeader[] = {"annotator_id", "tuple_id",
                                            "best_model", "worst_model"};
  std::vector<BwsRecord> records;
  for_each_csv_row(in, kHeader, [&](std::size_t line_no,
                                    const std::vector<std::string>& f) {
    if (f[2] == f[3]) {
      throw Error::validation("line " + std::to_string(line_no) +
                              ": best_model and worst_model must differ");
    }
    records.push_back({f[0], f[1], f[2], f[3]});
  });
  return records;
}

std::vector<PreferenceRecord> load_preference_csv(std::istream& in) {
  static constexpr const char* kHeader[] = {"annotator_id", "sample_id",
                                            "dataset_tag", "choice"};
  std::vector<PreferenceRecord> records;
  for_each_csv_row(in, kHeader, [&](std::size_t line_no,
                                    const std::vector<std::string>& f) {
    PreferenceRecord record{f[0], f[1], f[2], false};
    if (f[3] == "disentangled") {
      record.chose_disentangled = true;
    } else if (f[3] == "abstract") {
      record.chose_disentangled = false;
    } else {
      throw Error::validation("line " + std::to_string(line_no) +
                              ": choice must be 'disentangled' or 'abstract'");
    }
    records.push_back(std::move(record));
  });
  return records;
}

std::vector<BwsRating> bws_rating(std::span<const BwsRecord> records,
                                  std::span<const std::string> models) {
  if (models.empty()) {
    throw Error::validation("the model list must not be empty");
  }
  if (records.empty()) {
    throw Error::validation("no judgment records to rate");
  }
  std::map<std::string, BwsRating> tallies;
  for (const std::string& model : models) {
    if (model.empty()) {
      throw Error::validation("model names must not be empty");
    }
    auto [it, inserted] = tallies.emplace(model, BwsRating{model, 0, 0, 0.0});
    (void)it;
    if (!inserted) {
      throw Error::validation("model '" + model + "' is listed twice");
    }
  }
  for (const BwsRecord& record : records) {
    auto best = tallies.find(record.best_model);
    if (best == tallies.end()) {
      throw Error::validation("tuple '" + record.tuple_id +
                              "' names unknown model '" + record.best_model + "'");
    }
    auto worst = tallies.find(record.worst_model);
    if (worst == tallies.end()) {
      throw Error::validation("tuple '" + record.tuple_id +
                              "' names unknown model '" + record.worst_model +
                              "'");
    }
    ++best->second.best;
    ++worst->second.worst;
  }
  const double total = static_cast<double>(records.size());
  std::vector<BwsRating> ratings;
  ratings.reserve(models.size());
  for (const std::string& model : models) {
    BwsRating rating = tallies.at(model);
    rating.rating = (static_cast<double>(rating.best) -
                     static_cast<double>(rating.worst)) /
                    total;
    ratings.push_back(std::move(rating));
  }
  return ratings;
}

json bws_to_json(std::span<const BwsRating> ratings, std::size_t total_records) {
  json obj;
  obj["total_records"] = total_records;
  json arr = json::array();
  for (const BwsRating& rating : ratings) {
    arr.push_back({{"model", rating.model},
                   {"best", rating.best},
                   {"worst", rating.worst},
                   {"rating", rating.rating}});
  }
  obj["models"] = std::move(arr);
  return obj;
}

PreferenceTable preference_table(std::span<const PreferenceRecord> records) {
  if (records.empty()) {
    throw Error::validation("no judgment records to tabulate");
  }
  std::set<std::string> annotators;
  std::map<std::string, std::map<std::string, PreferenceCell>> by_dataset;
  for (const PreferenceRecord& record : records) {
    annotators.insert(record.annotator_id);
    PreferenceCell& cell = by_dataset[record.dataset_tag][record.annotator_id];
    cell.annotator = record.annotator_id;
    ++cell.total;
    if (record.chose_disentangled) ++cell.chosen;
  }

  PreferenceTable table;
  table.annotators.assign(annotators.begin(), annotators.end());
  for (auto& [dataset, cells] : by_dataset) {
    PreferenceDataset row;
    row.dataset = dataset;
    double sum = 0.0;
    for (auto& [annotator, cell] : cells) {
      cell.percent = 100.0 * static_cast<double>(cell.chosen) /
                     static_cast<double>(cell.total);
      sum += cell.percent;
      row.cells.push_back(cell);
    }
    row.average = sum / static_cast<double>(row.cells.size());
    table.missing_cells += annotators.size() - cells.size();
    table.datasets.push_back(std::move(row));
  }
  return table;
}

json preference_to_json(const PreferenceTable& table) {
  json obj;
  obj["annotators"] = table.annotators;
  json datasets = json::array();
  for (const PreferenceDataset& dataset : table.datasets) {
    json cells = json::array();
    for (const PreferenceCell& cell : dataset.cells) {
      cells.push_back({{"annotator", cell.annotator},
                       {"chosen", cell.chosen},
                       {"total", cell.total},
                       {"percent", cell.percent},
                       {"percent_display", std::llround(cell.percent)}});
    }
    datasets.push_back({{"dataset", dataset.dataset},
                        {"cells", std::move(cells)},
                        {"average", dataset.average},
                        {"average_display", std::llround(dataset.average)}});
  }
  obj["datasets"] = std::move(datasets);
  obj["missing_cells"] = table.missing_cells;
  return obj;
}

}  // namespace disum
