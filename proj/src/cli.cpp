#include "disum/cli.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>

#include "disum/analysis.hpp"
#include "disum/config.hpp"
#include "disum/corpus.hpp"
#include "disum/informativeness.hpp"
#include "disum/judge.hpp"
#include "disum/jsonl.hpp"
#include "disum/metrics.hpp"
#include "disum/parallel.hpp"
#include "disum/refgen.hpp"

namespace disum {

namespace {

// --- structured logging -----------------------------------------------------

void log_event(const char* level, const char* event, json fields = json::object()) {
  json line;
  line["level"] = level;
  line["event"] = event;
  for (auto& [key, value] : fields.items()) line[key] = value;
  std::cerr << line.dump() << '\n';
}

void log_line_issues(const char* file_label, const std::vector<LineIssue>& issues) {
  constexpr std::size_t kMaxLogged = 20;
  for (std::size_t i = 0; i < issues.size() && i < kMaxLogged; ++i) {
    log_event("warning", "line_issue",
              {{"file", file_label},
               {"line", issues[i].line},
               {"message", issues[i].message}});
  }
  if (issues.size() > kMaxLogged) {
    log_event("warning", "line_issues_truncated",
              {{"file", file_label}, {"omitted", issues.size() - kMaxLogged}});
  }
}

void emit_json(const json& obj, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << obj.dump(2) << '\n';
  } else {
    std::ofstream out = open_output(out_path);
    out << obj.dump(2) << '\n';
    if (!out) throw Error::io("failed writing '" + out_path + "'");
  }
}

// --- option state -----------------------------------------------------------

struct CommonOpts {
  std::string config_path;
  bool dry_run = false;
};

struct CurateOpts {
  CommonOpts common;
  std::string input, out, stats;
  std::string scores;
  double threshold = 0.5;
  std::string export_path;
  std::size_t min_citations = 5;
  std::size_t max_citations = 20;
  unsigned jobs = 0;
  CLI::Option* export_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* min_opt = nullptr;
  CLI::Option* max_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

struct RefgenOpts {
  CommonOpts common;
  std::string corpus, scores, out;
  double threshold = 0.5;
  CLI::Option* threshold_opt = nullptr;
  // accuracy subcommand
  std::string pred, gold, accuracy_out;
};

struct EvaluateOpts {
  CommonOpts common;
  std::string system, refs, embeddings, report, aggregate_path;
  std::string group_by;
  unsigned jobs = 0;
  CLI::Option* jobs_opt = nullptr;
};

struct AnalyzeOpts {
  CommonOpts common;
  // bins
  std::string bins_corpus, labels, bins_out, bins_csv;
  // domains
  std::string domains_corpus, domains_out, domains_csv;
  std::size_t top = 10;
  // low-scores
  std::string reports, metric = "r1-con", low_out, low_csv;
  double threshold = 20.0;
  std::vector<std::string> compare;
  CLI::Option* threshold_opt = nullptr;
};

struct InfoOpts {
  CommonOpts common;
  std::string score_input, score_out;
  double ce = 0.0, inf = 0.0, lambda = 0.05;
  std::string loss_out;
  CLI::Option* lambda_opt = nullptr;
};

struct JudgeOpts {
  CommonOpts common;
  std::string bws_input, models = "CC,CC+INF,MH,MH+INF", bws_out;
  std::string prefs_input, prefs_out;
};

void add_common(CLI::App* cmd, CommonOpts& common) {
  cmd->add_option("--config", common.config_path, "JSON configuration file")
      ->envname("DISUM_CONFIG");
  cmd->add_flag("--dry-run", common.dry_run,
                "validate inputs, then exit without writing anything");
}

RunConfig resolve_config(const CommonOpts& common) {
  if (common.config_path.empty()) return RunConfig{};
  return load_run_config(common.config_path);
}

// --- shared input readers ---------------------------------------------------

struct AbstractRow {
  std::string paper_id;
  std::string abstract_text;
  std::vector<std::string> domains;
};

// Accepts any JSONL whose rows carry paper_id and abstract (curated
// corpus files and raw corpus files both qualify).
std::vector<AbstractRow> load_abstract_rows(std::istream& in,
                                            std::vector<LineIssue>& issues,
                                            std::size_t& duplicates) {
  std::vector<AbstractRow> rows;
  std::unordered_set<std::string> seen;
  for_each_jsonl(in, issues, [&](std::size_t line, const json& obj) {
    const std::string where = "line " + std::to_string(line);
    AbstractRow row;
    row.paper_id = require_nonempty_string(obj, "paper_id", where);
    row.abstract_text = require_string(obj, "abstract", where);
    row.domains = optional_string_array(obj, "domains", where);
    if (!seen.insert(row.paper_id).second) {
      ++duplicates;
      return;
    }
    rows.push_back(std::move(row));
  });
  std::sort(rows.begin(), rows.end(), [](const AbstractRow& a, const AbstractRow& b) {
    return a.paper_id < b.paper_id;
  });
  return rows;
}

struct DomainsRow {
  std::string paper_id;
  std::vector<std::string> domains;
};

std::vector<DomainsRow> load_domains_rows(std::istream& in,
                                          std::vector<LineIssue>& issues,
                                          std::size_t& duplicates) {
  std::vector<DomainsRow> rows;
  std::unordered_set<std::string> seen;
  for_each_jsonl(in, issues, [&](std::size_t line, const json& obj) {
    const std::string where = "line " + std::to_string(line);
    DomainsRow row;
    row.paper_id = require_nonempty_string(obj, "paper_id", where);
    row.domains = optional_string_array(obj, "domains", where);
    if (!seen.insert(row.paper_id).second) {
      ++duplicates;
      return;
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

std::unordered_map<std::string, PairEmbeddings> load_embeddings(
    std::istream& in, std::vector<LineIssue>& issues, std::size_t& duplicates) {
  std::unordered_map<std::string, PairEmbeddings> map;
  for_each_jsonl(in, issues, [&](std::size_t line, const json& obj) {
    const std::string where = "line " + std::to_string(line);
    std::string paper_id = require_nonempty_string(obj, "paper_id", where);
    std::string side = require_nonempty_string(obj, "side", where);
    const json& rows = require_array(obj, "vectors", where);
    std::vector<std::vector<double>> raw;
    raw.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array()) {
        throw Error::validation(where + ": field 'vectors[" + std::to_string(i) +
                                "]' must be an array");
      }
      std::vector<double> v;
      v.reserve(rows[i].size());
      for (const json& x : rows[i]) {
        if (!x.is_number()) {
          throw Error::validation(where + ": field 'vectors[" +
                                  std::to_string(i) + "]' must contain numbers");
        }
        v.push_back(x.get<double>());
      }
      raw.push_back(std::move(v));
    }
    EmbeddingSequence seq = EmbeddingSequence::from_raw(std::move(raw), where);

    PairEmbeddings& pe = map[paper_id];
    std::optional<EmbeddingSequence>* slot = nullptr;
    if (side == "s_con") slot = &pe.s_con;
    else if (side == "s_ctx") slot = &pe.s_ctx;
    else if (side == "y_con") slot = &pe.y_con;
    else if (side == "y_ctx") slot = &pe.y_ctx;
    if (!slot) {
      throw Error::validation(where +
                              ": side must be one of s_con, s_ctx, y_con, y_ctx");
    }
    if (slot->has_value()) {
      ++duplicates;
      return;
    }
    *slot = std::move(seq);
  });
  return map;
}

void write_csv_line(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) out << ',';
    out << f;
    first = false;
  }
  out << '\n';
}

// --- subcommand implementations ---------------------------------------------

int cmd_curate(const CurateOpts& o, const RunConfig& cfg) {
  std::ifstream in = open_input(o.input);
  CorpusLoadResult corpus = load_corpus(in);
  log_line_issues("input", corpus.issues);
  log_event("info", "corpus_loaded",
            {{"records", corpus.records.size()},
             {"line_issues", corpus.issues.size()}});

  std::optional<ScoresFile> scores;
  if (!o.scores.empty()) {
    std::ifstream sin = open_input(o.scores);
    scores = load_scores(sin);
    log_line_issues("scores", scores->issues);
    if (scores->duplicates > 0) {
      log_event("warning", "duplicate_scores", {{"count", scores->duplicates}});
    }
  }

  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }

  CurateOptions options;
  options.min_citations = o.min_opt->count() ? o.min_citations : cfg.min_citations;
  options.max_citations = o.max_opt->count() ? o.max_citations : cfg.max_citations;
  options.tokenizer = cfg.tokenizer;
  options.jobs = o.jobs_opt->count() ? o.jobs : cfg.jobs;
  CurateResult result = curate(corpus.records, options);

  if (scores) {
    const double threshold =
        o.threshold_opt->count() ? o.threshold : cfg.label_threshold;
    static const SentenceScores kNoScores;
    for (CuratedExample& ex : result.examples) {
      auto it = scores->by_paper.find(ex.paper_id);
      const SentenceScores& per_paper =
          it == scores->by_paper.end() ? kNoScores : it->second;
      ex.references = references_from_abstract(ex.paper_id, ex.abstract_text,
                                               per_paper, threshold);
    }
    result.stats = compute_stats(result.examples, options.tokenizer);
  }

  {
    std::ofstream out = open_output(o.out);
    for (const CuratedExample& ex : result.examples) {
      write_jsonl_line(out, curated_to_json(ex));
    }
    if (!out) throw Error::io("failed writing '" + o.out + "'");
  }
  {
    std::ofstream out = open_output(o.stats);
    out << stats_to_json(result.stats).dump(2) << '\n';
    if (!out) throw Error::io("failed writing '" + o.stats + "'");
  }

  if (o.export_opt->count() > 0) {
    const std::string path =
        o.export_path.empty() ? o.out + ".controlcode.jsonl" : o.export_path;
    std::ofstream out = open_output(path);
    const std::size_t lines = export_controlcode(result.examples, out);
    if (!out) throw Error::io("failed writing '" + path + "'");
    log_event("info", "controlcode_exported", {{"path", path}, {"lines", lines}});
  }

  log_event("info", "curated",
            {{"examples", result.examples.size()},
             {"dangling_links", result.warnings.dangling_links},
             {"invalid_mentions", result.warnings.invalid_mentions},
             {"duplicate_paper_ids", result.warnings.duplicate_paper_ids}});
  return 0;
}

int cmd_refgen(const RefgenOpts& o, const RunConfig& cfg) {
  if (o.corpus.empty() || o.scores.empty() || o.out.empty()) {
    throw Error::validation("refgen requires --corpus, --scores and --out");
  }
  std::ifstream cin_file = open_input(o.corpus);
  std::vector<LineIssue> issues;
  std::size_t duplicates = 0;
  std::vector<AbstractRow> rows = load_abstract_rows(cin_file, issues, duplicates);
  log_line_issues("corpus", issues);
  if (duplicates > 0) {
    log_event("warning", "duplicate_paper_ids", {{"count", duplicates}});
  }

  std::ifstream sin = open_input(o.scores);
  ScoresFile scores = load_scores(sin);
  log_line_issues("scores", scores.issues);
  if (scores.duplicates > 0) {
    log_event("warning", "duplicate_scores", {{"count", scores.duplicates}});
  }

  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }

  const double threshold =
      o.threshold_opt->count() ? o.threshold : cfg.label_threshold;
  std::ofstream out = open_output(o.out);
  std::size_t empty_contribution = 0, empty_context = 0;
  static const SentenceScores kNoScores;
  for (const AbstractRow& row : rows) {
    auto it = scores.by_paper.find(row.paper_id);
    const SentenceScores& per_paper =
        it == scores.by_paper.end() ? kNoScores : it->second;
    SummaryPair refs = references_from_abstract(row.paper_id, row.abstract_text,
                                                per_paper, threshold);
    json flags = json::array();
    if (refs.contribution.empty()) {
      flags.push_back("empty_contribution");
      ++empty_contribution;
    }
    if (refs.context.empty()) {
      flags.push_back("empty_context");
      ++empty_context;
    }
    write_jsonl_line(out, {{"paper_id", row.paper_id},
                           {"y_con", refs.contribution},
                           {"y_ctx", refs.context},
                           {"domains", row.domains},
                           {"flags", flags}});
  }
  if (!out) throw Error::io("failed writing '" + o.out + "'");
  log_event("info", "references_written",
            {{"papers", rows.size()},
             {"empty_contribution", empty_contribution},
             {"empty_context", empty_context}});
  return 0;
}

int cmd_refgen_accuracy(const RefgenOpts& o) {
  std::ifstream pin = open_input(o.pred);
  LabelsFile pred = load_labels(pin);
  log_line_issues("pred", pred.issues);
  std::ifstream gin = open_input(o.gold);
  LabelsFile gold = load_labels(gin);
  log_line_issues("gold", gold.issues);
  if (pred.duplicates + gold.duplicates > 0) {
    log_event("warning", "duplicate_paper_ids",
              {{"pred", pred.duplicates}, {"gold", gold.duplicates}});
  }
  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  AccuracyReport report = file_accuracy(pred, gold);
  emit_json(accuracy_to_json(report), o.accuracy_out);
  return 0;
}

int cmd_evaluate(const EvaluateOpts& o, const RunConfig& cfg) {
  struct SystemRow {
    std::string paper_id;
    SummaryPair pair;
  };
  std::vector<SystemRow> system_rows;
  {
    std::ifstream in = open_input(o.system);
    std::vector<LineIssue> issues;
    std::unordered_set<std::string> seen;
    std::size_t duplicates = 0;
    for_each_jsonl(in, issues, [&](std::size_t line, const json& obj) {
      const std::string where = "line " + std::to_string(line);
      SystemRow row;
      row.paper_id = require_nonempty_string(obj, "paper_id", where);
      row.pair.contribution = require_string(obj, "s_con", where);
      row.pair.context = require_string(obj, "s_ctx", where);
      if (!seen.insert(row.paper_id).second) {
        ++duplicates;
        return;
      }
      system_rows.push_back(std::move(row));
    });
    log_line_issues("system", issues);
    if (duplicates > 0) {
      log_event("warning", "duplicate_paper_ids",
                {{"file", "system"}, {"count", duplicates}});
    }
  }
  std::sort(system_rows.begin(), system_rows.end(),
            [](const SystemRow& a, const SystemRow& b) {
              return a.paper_id < b.paper_id;
            });

  struct RefRow {
    SummaryPair pair;
    std::vector<std::string> domains;
  };
  std::unordered_map<std::string, RefRow> refs;
  {
    std::ifstream in = open_input(o.refs);
    std::vector<LineIssue> issues;
    std::size_t duplicates = 0;
    for_each_jsonl(in, issues, [&](std::size_t line, const json& obj) {
      const std::string where = "line " + std::to_string(line);
      std::string paper_id = require_nonempty_string(obj, "paper_id", where);
      const json& con = require_field(obj, "y_con", where);
      const json& ctx = require_field(obj, "y_ctx", where);
      if (con.is_null() || ctx.is_null()) {
        throw Error::validation(where + ": reference sides are null");
      }
      if (!con.is_string() || !ctx.is_string()) {
        throw Error::validation(where +
                                ": fields 'y_con' and 'y_ctx' must be strings");
      }
      RefRow row;
      row.pair.contribution = con.get<std::string>();
      row.pair.context = ctx.get<std::string>();
      row.domains = optional_string_array(obj, "domains", where);
      if (!refs.emplace(std::move(paper_id), std::move(row)).second) {
        ++duplicates;
      }
    });
    log_line_issues("refs", issues);
    if (duplicates > 0) {
      log_event("warning", "duplicate_paper_ids",
                {{"file", "refs"}, {"count", duplicates}});
    }
  }

  std::unordered_map<std::string, PairEmbeddings> embeddings;
  if (!o.embeddings.empty()) {
    std::ifstream in = open_input(o.embeddings);
    std::vector<LineIssue> issues;
    std::size_t duplicates = 0;
    embeddings = load_embeddings(in, issues, duplicates);
    log_line_issues("embeddings", issues);
    if (duplicates > 0) {
      log_event("warning", "duplicate_embedding_sides", {{"count", duplicates}});
    }
  }

  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }

  struct WorkItem {
    const SystemRow* system;
    const RefRow* ref;
    const PairEmbeddings* embeddings;
  };
  std::vector<WorkItem> items;
  items.reserve(system_rows.size());
  std::size_t skipped = 0;
  for (const SystemRow& row : system_rows) {
    auto it = refs.find(row.paper_id);
    if (it == refs.end()) {
      ++skipped;
      continue;
    }
    auto emb = embeddings.find(row.paper_id);
    items.push_back(
        {&row, &it->second, emb == embeddings.end() ? nullptr : &emb->second});
  }
  if (skipped > 0) {
    log_event("warning", "missing_references", {{"count", skipped}});
  }

  const Evaluator evaluator(cfg.tokenizer, cfg.nouveau);
  const unsigned jobs = o.jobs_opt->count() ? o.jobs : cfg.jobs;
  std::vector<MetricReport> reports = parallel_map(
      items,
      [&](const WorkItem& item) {
        return evaluator.evaluate_pair(item.system->paper_id, item.ref->domains,
                                       item.system->pair, item.ref->pair,
                                       item.embeddings);
      },
      jobs);

  {
    std::ofstream out = open_output(o.report);
    for (const MetricReport& report : reports) {
      write_jsonl_line(out, report_to_json(report));
    }
    if (!out) throw Error::io("failed writing '" + o.report + "'");
  }

  const GroupBy group_by =
      o.group_by == "domain" ? GroupBy::Domain : GroupBy::None;
  std::vector<AggregateGroup> groups = aggregate(reports, group_by);
  json agg = aggregate_to_json(groups, group_by);
  agg["examples"] = reports.size();
  agg["skipped_missing_reference"] = skipped;
  const std::string agg_path =
      o.aggregate_path.empty() ? o.report + ".aggregate.json" : o.aggregate_path;
  {
    std::ofstream out = open_output(agg_path);
    out << agg.dump(2) << '\n';
    if (!out) throw Error::io("failed writing '" + agg_path + "'");
  }
  log_event("info", "evaluated",
            {{"examples", reports.size()},
             {"skipped_missing_reference", skipped},
             {"report", o.report},
             {"aggregate", agg_path}});
  return 0;
}

int cmd_analyze_bins(const AnalyzeOpts& o) {
  std::ifstream cin_file = open_input(o.bins_corpus);
  CorpusLoadResult corpus = load_corpus(cin_file);
  log_line_issues("corpus", corpus.issues);
  std::unordered_map<std::string, const PaperRecord*> index;
  for (const PaperRecord& rec : corpus.records) index.emplace(rec.paper_id, &rec);

  std::ifstream lin = open_input(o.labels);
  LabelsFile labels = load_labels(lin);
  log_line_issues("labels", labels.issues);

  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }

  std::vector<PaperLocations> locations;
  std::size_t unknown_papers = 0, empty_bodies = 0;
  for (const auto& [paper_id, label_list] : labels.by_paper) {
    auto it = index.find(paper_id);
    if (it == index.end()) {
      ++unknown_papers;
      continue;
    }
    const PaperRecord& rec = *it->second;
    if (rec.body_sentences.empty()) {
      ++empty_bodies;
      continue;
    }
    if (label_list.size() != rec.body_sentences.size()) {
      throw Error::validation(
          "paper '" + paper_id + "': " + std::to_string(label_list.size()) +
          " labels for " + std::to_string(rec.body_sentences.size()) +
          " body sentences");
    }
    PaperLocations loc;
    loc.sentence_count = rec.body_sentences.size();
    for (std::size_t i = 0; i < label_list.size(); ++i) {
      if (label_list[i] == 1) loc.contribution_indices.push_back(i);
    }
    locations.push_back(std::move(loc));
  }
  if (unknown_papers > 0) {
    log_event("warning", "labels_without_paper", {{"count", unknown_papers}});
  }
  if (empty_bodies > 0) {
    log_event("warning", "labels_for_empty_body", {{"count", empty_bodies}});
  }

  LocationHistogram histogram = bin_locations(locations);
  emit_json(histogram_to_json(histogram), o.bins_out);
  if (!o.bins_csv.empty()) {
    std::ofstream csv = open_output(o.bins_csv);
    write_csv_line(csv, {"bin", "contribution", "total", "fraction"});
    for (std::size_t b = 0; b < 10; ++b) {
      write_csv_line(csv, {std::to_string(b),
                           std::to_string(histogram.contribution_counts[b]),
                           std::to_string(histogram.total_counts[b]),
                           std::to_string(histogram.fractions[b])});
    }
    if (!csv) throw Error::io("failed writing '" + o.bins_csv + "'");
  }
  return 0;
}

int cmd_analyze_domains(const AnalyzeOpts& o) {
  std::ifstream in = open_input(o.domains_corpus);
  std::vector<LineIssue> issues;
  std::size_t duplicates = 0;
  std::vector<DomainsRow> rows = load_domains_rows(in, issues, duplicates);
  log_line_issues("corpus", issues);
  if (duplicates > 0) {
    log_event("warning", "duplicate_paper_ids", {{"count", duplicates}});
  }
  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  std::vector<std::vector<std::string>> lists;
  lists.reserve(rows.size());
  for (DomainsRow& row : rows) lists.push_back(std::move(row.domains));
  auto counts = domain_frequency(lists, o.top);

  json obj;
  obj["total_papers"] = rows.size();
  json arr = json::array();
  for (const auto& [domain, count] : counts) {
    arr.push_back({{"domain", domain}, {"count", count}});
  }
  obj["rows"] = std::move(arr);
  emit_json(obj, o.domains_out);
  if (!o.domains_csv.empty()) {
    std::ofstream csv = open_output(o.domains_csv);
    write_csv_line(csv, {"domain", "count"});
    for (const auto& [domain, count] : counts) {
      write_csv_line(csv, {domain, std::to_string(count)});
    }
    if (!csv) throw Error::io("failed writing '" + o.domains_csv + "'");
  }
  return 0;
}

int cmd_analyze_low_scores(const AnalyzeOpts& o, const RunConfig& cfg) {
  std::ifstream in = open_input(o.reports);
  std::vector<LineIssue> issues;
  std::vector<MetricReport> reports;
  for_each_jsonl(in, issues, [&](std::size_t line, const json& obj) {
    reports.push_back(report_from_json(obj, "line " + std::to_string(line)));
  });
  log_line_issues("reports", issues);

  const MetricSelector metric = MetricSelector::parse(o.metric);
  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  const double threshold =
      o.threshold_opt->count() ? o.threshold : cfg.low_score_threshold;
  LowScoreTable table = low_score_rate(reports, metric, threshold);
  std::optional<LowScoreComparison> comparison;
  if (!o.compare.empty()) {
    comparison = compare_rates(table, o.compare[0], o.compare[1]);
    if (!comparison->ratio) {
      log_event("warning", "undefined_ratio",
                {{"domain_b", comparison->domain_b}});
    }
  }
  emit_json(low_score_to_json(table, comparison), o.low_out);
  if (!o.low_csv.empty()) {
    std::ofstream csv = open_output(o.low_csv);
    write_csv_line(csv, {"domain", "below", "total", "rate"});
    for (const LowScoreRow& row : table.rows) {
      write_csv_line(csv, {row.domain, std::to_string(row.below),
                           std::to_string(row.total), std::to_string(row.rate)});
    }
    if (!csv) throw Error::io("failed writing '" + o.low_csv + "'");
  }
  return 0;
}

int cmd_info_score(const InfoOpts& o) {
  std::ifstream in = open_input(o.score_input);
  LikelihoodFile file = load_likelihoods(in);
  log_line_issues("input", file.issues);
  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  ScoreSummary summary = score_records(file.records);
  emit_json(score_summary_to_json(file, summary), o.score_out);
  return 0;
}

int cmd_info_loss(const InfoOpts& o, const RunConfig& cfg) {
  const double lambda = o.lambda_opt->count() ? o.lambda : cfg.lambda;
  if (o.common.dry_run) {
    LossConfig probe{lambda};
    combined_loss(o.ce, o.inf, probe);
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  const double loss = combined_loss(o.ce, o.inf, LossConfig{lambda});
  json obj;
  obj["ce"] = o.ce;
  obj["inf"] = o.inf;
  obj["lambda"] = lambda;
  obj["loss"] = loss;
  emit_json(obj, o.loss_out);
  return 0;
}

std::vector<std::string> split_model_list(const std::string& models) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= models.size()) {
    std::size_t comma = models.find(',', start);
    if (comma == std::string::npos) comma = models.size();
    std::string model = models.substr(start, comma - start);
    const std::size_t a = model.find_first_not_of(" \t");
    if (a == std::string::npos) {
      throw Error::validation("model list contains an empty name");
    }
    const std::size_t b = model.find_last_not_of(" \t");
    out.push_back(model.substr(a, b - a + 1));
    start = comma + 1;
  }
  return out;
}

int cmd_judge_bws(const JudgeOpts& o) {
  std::ifstream in = open_input(o.bws_input);
  std::vector<BwsRecord> records = load_bws_csv(in);
  std::vector<std::string> models = split_model_list(o.models);
  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  std::vector<BwsRating> ratings = bws_rating(records, models);
  emit_json(bws_to_json(ratings, records.size()), o.bws_out);
  return 0;
}

int cmd_judge_prefs(const JudgeOpts& o) {
  std::ifstream in = open_input(o.prefs_input);
  std::vector<PreferenceRecord> records = load_preference_csv(in);
  if (o.common.dry_run) {
    log_event("info", "dry_run_complete", json::object());
    return 0;
  }
  PreferenceTable table = preference_table(records);
  if (table.missing_cells > 0) {
    log_event("warning", "missing_cells", {{"count", table.missing_cells}});
  }
  emit_json(preference_to_json(table), o.prefs_out);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"corpus curation and evaluation for two-sided paper summaries"};
  app.require_subcommand(1);

  CurateOpts curate_opts;
  CLI::App* curate_cmd = app.add_subcommand(
      "curate", "build a curated corpus from a paper dump");
  curate_cmd->add_option("--input", curate_opts.input, "corpus JSONL")->required();
  curate_cmd->add_option("--out", curate_opts.out, "curated examples JSONL")
      ->required();
  curate_cmd->add_option("--stats", curate_opts.stats, "corpus statistics JSON")
      ->required();
  curate_opts.min_opt = curate_cmd->add_option(
      "--min-citations", curate_opts.min_citations,
      "citations required on each side");
  curate_opts.max_opt = curate_cmd->add_option(
      "--max-citations", curate_opts.max_citations, "citations kept per side");
  curate_cmd->add_option("--scores", curate_opts.scores,
                         "sentence scores JSONL; fills in reference summaries");
  curate_opts.threshold_opt = curate_cmd->add_option(
      "--threshold", curate_opts.threshold, "contribution threshold");
  curate_opts.export_opt =
      curate_cmd
          ->add_option("--export-controlcode", curate_opts.export_path,
                       "also write control-code training pairs "
                       "(default path: <out>.controlcode.jsonl)")
          ->expected(0, 1);
  curate_opts.jobs_opt =
      curate_cmd->add_option("--jobs", curate_opts.jobs, "worker threads (0 = auto)");
  add_common(curate_cmd, curate_opts.common);

  RefgenOpts refgen_opts;
  CLI::App* refgen_cmd = app.add_subcommand(
      "refgen", "derive reference summaries from sentence scores");
  refgen_cmd->add_option("--corpus", refgen_opts.corpus,
                         "curated or raw corpus JSONL");
  refgen_cmd->add_option("--scores", refgen_opts.scores, "sentence scores JSONL");
  refgen_cmd->add_option("--out", refgen_opts.out, "references JSONL");
  refgen_opts.threshold_opt = refgen_cmd->add_option(
      "--threshold", refgen_opts.threshold, "contribution threshold");
  add_common(refgen_cmd, refgen_opts.common);
  CLI::App* accuracy_cmd = refgen_cmd->add_subcommand(
      "accuracy", "compare predicted labels against gold labels");
  accuracy_cmd->add_option("--pred", refgen_opts.pred, "predicted labels JSONL")
      ->required();
  accuracy_cmd->add_option("--gold", refgen_opts.gold, "gold labels JSONL")
      ->required();
  accuracy_cmd->add_option("--out", refgen_opts.accuracy_out,
                           "write the report here instead of stdout");
  add_common(accuracy_cmd, refgen_opts.common);

  EvaluateOpts evaluate_opts;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "score system summaries against references");
  evaluate_cmd->add_option("--system", evaluate_opts.system, "system outputs JSONL")
      ->required();
  evaluate_cmd->add_option("--refs", evaluate_opts.refs, "references JSONL")
      ->required();
  evaluate_cmd->add_option("--embeddings", evaluate_opts.embeddings,
                           "sentence embeddings JSONL");
  evaluate_cmd->add_option("--report", evaluate_opts.report,
                           "per-example report JSONL")
      ->required();
  evaluate_cmd->add_option("--aggregate", evaluate_opts.aggregate_path,
                           "aggregate JSON path (default: <report>.aggregate.json)");
  evaluate_cmd
      ->add_option("--group-by", evaluate_opts.group_by, "aggregate per group")
      ->check(CLI::IsMember({"domain"}));
  evaluate_opts.jobs_opt = evaluate_cmd->add_option(
      "--jobs", evaluate_opts.jobs, "worker threads (0 = auto)");
  add_common(evaluate_cmd, evaluate_opts.common);

  AnalyzeOpts analyze_opts;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "descriptive statistics and breakdowns");
  analyze_cmd->require_subcommand(1);
  CLI::App* bins_cmd = analyze_cmd->add_subcommand(
      "bins", "where in the abstract contribution sentences sit");
  bins_cmd->add_option("--corpus", analyze_opts.bins_corpus, "corpus JSONL")
      ->required();
  bins_cmd->add_option("--labels", analyze_opts.labels, "sentence labels JSONL")
      ->required();
  bins_cmd->add_option("--out", analyze_opts.bins_out,
                       "write the histogram here instead of stdout");
  bins_cmd->add_option("--csv", analyze_opts.bins_csv, "also write CSV");
  add_common(bins_cmd, analyze_opts.common);
  CLI::App* domains_cmd =
      analyze_cmd->add_subcommand("domains", "domain tag frequencies");
  domains_cmd->add_option("--corpus", analyze_opts.domains_corpus, "corpus JSONL")
      ->required();
  domains_cmd->add_option("--top", analyze_opts.top, "rows to keep");
  domains_cmd->add_option("--out", analyze_opts.domains_out,
                          "write the table here instead of stdout");
  domains_cmd->add_option("--csv", analyze_opts.domains_csv, "also write CSV");
  add_common(domains_cmd, analyze_opts.common);
  CLI::App* low_cmd = analyze_cmd->add_subcommand(
      "low-scores", "per-domain share of low-scoring examples");
  low_cmd->add_option("--reports", analyze_opts.reports, "report JSONL")
      ->required();
  low_cmd->add_option("--metric", analyze_opts.metric, "score column");
  analyze_opts.threshold_opt =
      low_cmd->add_option("--threshold", analyze_opts.threshold, "low-score cutoff");
  low_cmd->add_option("--compare", analyze_opts.compare,
                      "two domains to compare as a rate ratio")
      ->expected(2);
  low_cmd->add_option("--out", analyze_opts.low_out,
                      "write the table here instead of stdout");
  low_cmd->add_option("--csv", analyze_opts.low_csv, "also write CSV");
  add_common(low_cmd, analyze_opts.common);

  InfoOpts info_opts;
  CLI::App* info_cmd =
      app.add_subcommand("info", "informativeness scoring utilities");
  info_cmd->require_subcommand(1);
  CLI::App* score_cmd = info_cmd->add_subcommand(
      "score", "summarize informativeness over a likelihood file");
  score_cmd->add_option("--input", info_opts.score_input, "likelihood JSONL")
      ->required();
  score_cmd->add_option("--out", info_opts.score_out,
                        "write the summary here instead of stdout");
  add_common(score_cmd, info_opts.common);
  CLI::App* loss_cmd = info_cmd->add_subcommand(
      "loss", "combine cross-entropy with the informativeness reward");
  loss_cmd->add_option("--ce", info_opts.ce, "cross-entropy loss")->required();
  loss_cmd->add_option("--inf", info_opts.inf, "informativeness reward")
      ->required();
  info_opts.lambda_opt =
      loss_cmd->add_option("--lambda", info_opts.lambda, "reward weight");
  loss_cmd->add_option("--out", info_opts.loss_out,
                       "write the result here instead of stdout");
  add_common(loss_cmd, info_opts.common);

  JudgeOpts judge_opts;
  CLI::App* judge_cmd =
      app.add_subcommand("judge", "tabulate human judgment files");
  judge_cmd->require_subcommand(1);
  CLI::App* bws_cmd = judge_cmd->add_subcommand(
      "bws", "best-worst scaling ratings over model tuples");
  bws_cmd->add_option("--input", judge_opts.bws_input, "judgments CSV")->required();
  bws_cmd->add_option("--models", judge_opts.models,
                      "comma-separated model names");
  bws_cmd->add_option("--out", judge_opts.bws_out,
                      "write the ratings here instead of stdout");
  add_common(bws_cmd, judge_opts.common);
  CLI::App* prefs_cmd = judge_cmd->add_subcommand(
      "prefs", "two-way preference percentages per annotator and dataset");
  prefs_cmd->add_option("--input", judge_opts.prefs_input, "judgments CSV")
      ->required();
  prefs_cmd->add_option("--out", judge_opts.prefs_out,
                        "write the table here instead of stdout");
  add_common(prefs_cmd, judge_opts.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    log_event("error", "fatal",
              {{"kind", "usage"}, {"message", e.what()}});
    return 1;
  }

  try {
    if (curate_cmd->parsed()) {
      return cmd_curate(curate_opts, resolve_config(curate_opts.common));
    }
    if (refgen_cmd->parsed()) {
      if (accuracy_cmd->parsed()) return cmd_refgen_accuracy(refgen_opts);
      return cmd_refgen(refgen_opts, resolve_config(refgen_opts.common));
    }
    if (evaluate_cmd->parsed()) {
      return cmd_evaluate(evaluate_opts, resolve_config(evaluate_opts.common));
    }
    if (analyze_cmd->parsed()) {
      const RunConfig cfg = resolve_config(analyze_opts.common);
      if (bins_cmd->parsed()) return cmd_analyze_bins(analyze_opts);
      if (domains_cmd->parsed()) return cmd_analyze_domains(analyze_opts);
      return cmd_analyze_low_scores(analyze_opts, cfg);
    }
    if (info_cmd->parsed()) {
      const RunConfig cfg = resolve_config(info_opts.common);
      if (score_cmd->parsed()) return cmd_info_score(info_opts);
      return cmd_info_loss(info_opts, cfg);
    }
    if (judge_cmd->parsed()) {
      if (bws_cmd->parsed()) return cmd_judge_bws(judge_opts);
      return cmd_judge_prefs(judge_opts);
    }
    throw Error::validation("no subcommand given");
  } catch (const Error& e) {
    log_event("error", "fatal",
              {{"kind", error_kind_name(e.kind())}, {"message", e.what()}});
    return e.kind() == ErrorKind::Io ? 2 : 1;
  } catch (const std::exception& e) {
    log_event("error", "fatal", {{"kind", "internal"}, {"message", e.what()}});
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace disum
