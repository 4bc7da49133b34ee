#include "disum/analysis.hpp"

#include <algorithm>
#include <map>

namespace disum {

LocationHistogram bin_locations(std::span<const PaperLocations> papers) {
  LocationHistogram histogram;
  for (const PaperLocations& paper : papers) {
    if (paper.sentence_count == 0) {
      throw Error::validation("a paper must have at least one sentence");
    }
    for (std::size_t j = 0; j < paper.sentence_count; ++j) {
      ++histogram.total_counts[10 * j / paper.sentence_count];
    }
    for (std::size_t j : paper.contribution_indices) {
      if (j >= paper.sentence_count) {
        throw Error::validation("contribution index " + std::to_string(j) +
                                " is out of range for " +
                                std::to_string(paper.sentence_count) +
                                " sentences");
      }
      ++histogram.contribution_counts[10 * j / paper.sentence_count];
    }
    ++histogram.papers;
    histogram.total_sentences += paper.sentence_count;
  }
  for (std::size_t b = 0; b < 10; ++b) {
    if (histogram.total_counts[b] > 0) {
      histogram.fractions[b] =
          static_cast<double>(histogram.contribution_counts[b]) /
          static_cast<double>(histogram.total_counts[b]);
    }
  }
  return histogram;
}

json histogram_to_json(const LocationHistogram& histogram) {
  json obj;
  obj["papers"] = histogram.papers;
  obj["total_sentences"] = histogram.total_sentences;
  json bins = json::array();
  for (std::size_t b = 0; b < 10; ++b) {
    bins.push_back({{"bin", b},
                    {"contribution", histogram.contribution_counts[b]},
                    {"total", histogram.total_counts[b]},
                    {"fraction", histogram.fractions[b]}});
  }
  obj["bins"] = std::move(bins);
  return obj;
}

std::vector<std::pair<std::string, std::size_t>> domain_frequency(
    std::span<const std::vector<std::string>> domain_lists, std::size_t top_k) {
  std::map<std::string, std::size_t> counts;
  for (const std::vector<std::string>& domains : domain_lists) {
    if (domains.empty()) {
      ++counts["None"];
      continue;
    }
    std::vector<std::string> unique(domains.begin(), domains.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const std::string& d : unique) ++counts[d];
  }
  std::vector<std::pair<std::string, std::size_t>> rows(counts.begin(),
                                                        counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (rows.size() > top_k) rows.resize(top_k);
  return rows;
}

LowScoreTable low_score_rate(std::span<const MetricReport> reports,
                             const MetricSelector& metric, double threshold) {
  LowScoreTable table;
  table.metric = metric.name();
  table.threshold = threshold;
  std::map<std::string, LowScoreRow> rows;
  for (const MetricReport& report : reports) {
    const std::optional<double> value = metric.value(report);
    if (!value) {
      ++table.skipped_missing_metric;
      continue;
    }
    auto tally = [&](const std::string& domain) {
      LowScoreRow& row = rows[domain];
      row.domain = domain;
      ++row.total;
      if (*value < threshold) ++row.below;
    };
    if (report.domains.empty()) {
      tally("None");
    } else {
      std::vector<std::string> unique(report.domains.begin(),
                                      report.domains.end());
      std::sort(unique.begin(), unique.end());
      unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
      for (const std::string& d : unique) tally(d);
    }
  }
  table.rows.reserve(rows.size());
  for (auto& [domain, row] : rows) {
    row.rate = static_cast<double>(row.below) / static_cast<double>(row.total);
    table.rows.push_back(std::move(row));
  }
  return table;
}

LowScoreComparison compare_rates(const LowScoreTable& table,
                                 const std::string& domain_a,
                                 const std::string& domain_b) {
  auto find = [&](const std::string& domain) -> const LowScoreRow& {
    for (const LowScoreRow& row : table.rows) {
      if (row.domain == domain) return row;
    }
    throw Error::validation("domain '" + domain + "' does not appear in the reports");
  };
  LowScoreComparison cmp;
  cmp.domain_a = domain_a;
  cmp.domain_b = domain_b;
  cmp.rate_a = find(domain_a).rate;
  cmp.rate_b = find(domain_b).rate;
  if (cmp.rate_b != 0.0) cmp.ratio = cmp.rate_a / cmp.rate_b;
  return cmp;
}

json low_score_to_json(const LowScoreTable& table,
                       const std::optional<LowScoreComparison>& comparison) {
  json obj;
  obj["metric"] = table.metric;
  obj["threshold"] = table.threshold;
  json rows = json::array();
  for (const LowScoreRow& row : table.rows) {
    rows.push_back({{"domain", row.domain},
                    {"below", row.below},
                    {"total", row.total},
                    {"rate", row.rate}});
  }
  obj["rows"] = std::move(rows);
  obj["skipped_missing_metric"] = table.skipped_missing_metric;
  if (comparison) {
    json cmp;
    cmp["domain_a"] = comparison->domain_a;
    cmp["domain_b"] = comparison->domain_b;
    cmp["rate_a"] = comparison->rate_a;
    cmp["rate_b"] = comparison->rate_b;
    cmp["ratio"] = comparison->ratio ? json(*comparison->ratio) : json(nullptr);
    cmp["defined"] = comparison->ratio.has_value();
    obj["comparison"] = std::move(cmp);
  }
  return obj;
}

}  // namespace disum
