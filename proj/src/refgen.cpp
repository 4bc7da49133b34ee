#include "disum/refgen.hpp"

#include <cmath>

#include "disum/sentences.hpp"

namespace disum {

ScoresFile load_scores(std::istream& in) {
  ScoresFile file;
  for_each_jsonl(in, file.issues, [&](std::size_t line, const json& obj) {
    const std::string where = "line " + std::to_string(line);
    std::string paper_id = require_nonempty_string(obj, "paper_id", where);
    std::size_t index = require_uint(obj, "sentence_index", where);
    double p = require_number(obj, "p_contribution", where);
    if (p < 0.0 || p > 1.0) {
      throw Error::validation(where +
                              ": field 'p_contribution' must lie in [0, 1]");
    }
    auto [it, inserted] = file.by_paper[paper_id].emplace(index, p);
    (void)it;
    if (!inserted) ++file.duplicates;
  });
  return file;
}

std::vector<SentenceLabel> label_sentences(const std::string& paper_id,
                                           std::span<const std::string> sentences,
                                           const SentenceScores& scores,
                                           double threshold) {
  if (!std::isfinite(threshold)) {
    throw Error::config("label threshold must be finite");
  }
  std::vector<SentenceLabel> labels;
  labels.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto it = scores.find(i);
    if (it == scores.end()) {
      throw Error::validation("paper '" + paper_id + "': no score for sentence " +
                              std::to_string(i));
    }
    SentenceLabel label;
    label.paper_id = paper_id;
    label.sentence_index = i;
    label.text = sentences[i];
    label.p_contribution = it->second;
    label.is_contribution = it->second >= threshold;
    labels.push_back(std::move(label));
  }
  return labels;
}

SummaryPair assemble_references(std::span<const SentenceLabel> labels) {
  SummaryPair pair;
  for (const SentenceLabel& label : labels) {
    std::string& side = label.is_contribution ? pair.contribution : pair.context;
    if (!side.empty()) side.push_back(' ');
    side += label.text;
  }
  return pair;
}

SummaryPair references_from_abstract(const std::string& paper_id,
                                     const std::string& abstract_text,
                                     const SentenceScores& scores,
                                     double threshold) {
  std::vector<std::string> sentences = split_sentences(abstract_text);
  return assemble_references(
      label_sentences(paper_id, sentences, scores, threshold));
}

double classifier_accuracy(std::span<const int> predicted,
                           std::span<const int> gold) {
  if (predicted.size() != gold.size()) {
    throw Error::validation("label lists differ in length (" +
                            std::to_string(predicted.size()) + " vs " +
                            std::to_string(gold.size()) + ")");
  }
  if (predicted.empty()) {
    throw Error::validation("label lists must be non-empty");
  }
  std::size_t matches = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == gold[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(predicted.size());
}

LabelsFile load_labels(std::istream& in) {
  LabelsFile file;
  for_each_jsonl(in, file.issues, [&](std::size_t line, const json& obj) {
    const std::string where = "line " + std::to_string(line);
    std::string paper_id = require_nonempty_string(obj, "paper_id", where);
    const json& arr = require_array(obj, "labels", where);
    if (arr.empty()) {
      throw Error::validation(where + ": field 'labels' must not be empty");
    }
    std::vector<int> labels;
    labels.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const json& v = arr[i];
      if (!v.is_number_integer() ||
          (v.get<std::int64_t>() != 0 && v.get<std::int64_t>() != 1)) {
        throw Error::validation(where + ": field 'labels[" + std::to_string(i) +
                                "]' must be 0 or 1");
      }
      labels.push_back(static_cast<int>(v.get<std::int64_t>()));
    }
    auto [it, inserted] = file.by_paper.emplace(paper_id, std::move(labels));
    (void)it;
    if (!inserted) ++file.duplicates;
  });
  return file;
}

AccuracyReport file_accuracy(const LabelsFile& pred, const LabelsFile& gold) {
  AccuracyReport report;
  for (const auto& [paper_id, pred_labels] : pred.by_paper) {
    auto it = gold.by_paper.find(paper_id);
    if (it == gold.by_paper.end()) {
      ++report.pred_only;
      continue;
    }
    const std::vector<int>& gold_labels = it->second;
    if (pred_labels.size() != gold_labels.size()) {
      throw Error::validation("paper '" + paper_id + "': label lists differ in "
                              "length (" + std::to_string(pred_labels.size()) +
                              " vs " + std::to_string(gold_labels.size()) + ")");
    }
    if (pred_labels.empty()) {
      throw Error::validation("paper '" + paper_id + "': label list is empty");
    }
    ++report.papers;
    report.sentences += pred_labels.size();
    for (std::size_t i = 0; i < pred_labels.size(); ++i) {
      if (pred_labels[i] == gold_labels[i]) ++report.matches;
    }
  }
  for (const auto& [paper_id, labels] : gold.by_paper) {
    (void)labels;
    if (!pred.by_paper.count(paper_id)) ++report.gold_only;
  }
  if (report.papers == 0) {
    throw Error::validation("prediction and gold files share no paper_id");
  }
  report.accuracy = static_cast<double>(report.matches) /
                    static_cast<double>(report.sentences);
  return report;
}

json accuracy_to_json(const AccuracyReport& report) {
  json obj;
  obj["papers"] = report.papers;
  obj["sentences"] = report.sentences;
  obj["matches"] = report.matches;
  obj["accuracy"] = report.accuracy;
  obj["pred_only"] = report.pred_only;
  obj["gold_only"] = report.gold_only;
  return obj;
}

}  // namespace disum
