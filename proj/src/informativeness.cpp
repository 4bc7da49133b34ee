#include "disum/informativeness.hpp"

#include <algorithm>
#include <cmath>
#include <istream>

namespace disum {

const char* summary_mode_name(SummaryMode mode) {
  return mode == SummaryMode::Contribution ? "contribution" : "context";
}

double informativeness(const LikelihoodRecord& record) {
  if (!std::isfinite(record.log_p_source) || record.log_p_source > 0.0) {
    throw Error::validation("example '" + record.example_id +
                            "': log_p_source must be finite and non-positive");
  }
  if (!std::isfinite(record.log_p_knowledge) || record.log_p_knowledge > 0.0) {
    throw Error::validation("example '" + record.example_id +
                            "': log_p_knowledge must be finite and non-positive");
  }
  return std::exp(record.log_p_source) * -record.log_p_knowledge;
}

double combined_loss(double ce_loss, double inf, const LossConfig& config) {
  if (!std::isfinite(config.lambda) || config.lambda < 0.0) {
    throw Error::config("lambda must be finite and non-negative");
  }
  if (!std::isfinite(ce_loss)) {
    throw Error::validation("cross-entropy loss must be finite");
  }
  if (!std::isfinite(inf)) {
    throw Error::validation("informativeness must be finite");
  }
  return ce_loss - config.lambda * inf;
}

ScoreSummary score_records(std::span<const LikelihoodRecord> records) {
  ScoreSummary summary;
  for (const LikelihoodRecord& record : records) {
    const double score = informativeness(record);
    ModeStats& stats = record.mode == SummaryMode::Contribution
                           ? summary.contribution
                           : summary.context;
    if (stats.count == 0) {
      stats.mean = stats.min = stats.max = score;
    } else {
      stats.mean += score;  // running sum; divided below
      stats.min = std::min(stats.min, score);
      stats.max = std::max(stats.max, score);
    }
    ++stats.count;
  }
  for (ModeStats* stats : {&summary.contribution, &summary.context}) {
    if (stats->count > 1) {
      stats->mean /= static_cast<double>(stats->count);
    }
  }
  return summary;
}

LikelihoodFile load_likelihoods(std::istream& in) {
  LikelihoodFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) break;
  }
  if (line_no == 0 || line.find_first_not_of(" \t") == std::string::npos) {
    throw Error::validation("likelihood file is empty; expected a header line");
  }
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw Error::validation("line " + std::to_string(line_no) +
                            ": header must be a JSON object");
  }
  for (const auto& [key, value] : header.items()) {
    (void)value;
    if (key != "convention") {
      throw Error::validation("line " + std::to_string(line_no) +
                              ": unexpected header field '" + key + "'");
    }
  }
  file.convention =
      require_nonempty_string(header, "convention", "line " + std::to_string(line_no));
  if (file.convention != "sequence" && file.convention != "per_token") {
    throw Error::validation("line " + std::to_string(line_no) +
                            ": convention must be 'sequence' or 'per_token'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      file.issues.push_back({line_no, "expected a JSON object"});
      continue;
    }
    try {
      LikelihoodRecord record;
      record.example_id = require_nonempty_string(obj, "example_id", where);
      const std::string mode = require_nonempty_string(obj, "mode", where);
      if (mode == "contribution") {
        record.mode = SummaryMode::Contribution;
      } else if (mode == "context") {
        record.mode = SummaryMode::Context;
      } else {
        throw Error::validation(where +
                                ": mode must be 'contribution' or 'context'");
      }
      record.log_p_source = require_number(obj, "log_p_source", where);
      record.log_p_knowledge = require_number(obj, "log_p_knowledge", where);
      if (record.log_p_source > 0.0 || record.log_p_knowledge > 0.0) {
        throw Error::validation(where + ": log-probabilities must be <= 0");
      }
      file.records.push_back(std::move(record));
    } catch (const Error& e) {
      file.issues.push_back({line_no, e.what()});
    }
  }
  return file;
}

namespace {

json mode_stats_to_json(const ModeStats& stats) {
  json obj;
  obj["count"] = stats.count;
  if (stats.count == 0) {
    obj["mean"] = nullptr;
    obj["min"] = nullptr;
    obj["max"] = nullptr;
  } else {
    obj["mean"] = stats.mean;
    obj["min"] = stats.min;
    obj["max"] = stats.max;
  }
  return obj;
}

}  // namespace

json score_summary_to_json(const LikelihoodFile& file, const ScoreSummary& summary) {
  json obj;
  obj["convention"] = file.convention;
  obj["records"] = file.records.size();
  obj["line_errors"] = file.issues.size();
  obj["contribution"] = mode_stats_to_json(summary.contribution);
  obj["context"] = mode_stats_to_json(summary.context);
  return obj;
}

}  // namespace disum
