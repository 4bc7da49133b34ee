#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "disum/cli.hpp"
#include "disum/jsonl.hpp"

using namespace disum;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path = fs::temp_directory_path() /
           ("disum_cli_" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

// Ten papers in a ring, each citing the next five; every paper has a
// three-sentence abstract and an eight-sentence body.
std::string ring_corpus_jsonl() {
  const std::size_t n = 10;
  auto name = [](std::size_t i) { return "r" + std::to_string(i); };
  std::ostringstream out;
  std::vector<json> papers(n);
  for (std::size_t i = 0; i < n; ++i) {
    json body = json::array();
    for (std::size_t s = 0; s < 8; ++s) {
      body.push_back({{"text", name(i) + " body sentence " + std::to_string(s)}});
    }
    papers[i] = {{"paper_id", name(i)},
                 {"abstract", "We propose method " + name(i) +
                                  ". Prior work exists. We improve results."},
                 {"body", body},
                 {"domains", json::array({i % 2 == 0 ? "Biology" : "Medicine"})},
                 {"outbound", json::array()},
                 {"inbound", json::array()}};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 1; d <= 5; ++d) {
      const std::size_t t = (i + d) % n;
      papers[i]["outbound"].push_back({{"id", name(t)},
                                       {"cited_count", 10 + (int)t},
                                       {"mentions", {0, 1}}});
      papers[t]["inbound"].push_back(
          {{"id", name(i)}, {"cited_count", 10 + (int)i}, {"mentions", {2, 3}}});
    }
  }
  for (const json& p : papers) out << p.dump() << "\n";
  return out.str();
}

std::string ring_scores_jsonl() {
  std::ostringstream out;
  const double ps[] = {0.9, 0.1, 0.8};
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t s = 0; s < 3; ++s) {
      out << json{{"paper_id", "r" + std::to_string(i)},
                  {"sentence_index", s},
                  {"p_contribution", ps[s]}}
                 .dump()
          << "\n";
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("curate writes deterministic outputs") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());

  auto run_curate = [&](const std::string& suffix,
                        const std::string& jobs) {
    return disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                       "--out", dir.file("curated" + suffix + ".jsonl"),
                       "--stats", dir.file("stats" + suffix + ".json"),
                       "--jobs", jobs});
  };
  CHECK(run_curate("1", "1") == 0);
  CHECK(run_curate("2", "1") == 0);
  CHECK(run_curate("8", "8") == 0);

  const std::string first = read_file(dir.file("curated1.jsonl"));
  CHECK_FALSE(first.empty());
  CHECK(first == read_file(dir.file("curated2.jsonl")));
  CHECK(first == read_file(dir.file("curated8.jsonl")));
  CHECK(read_file(dir.file("stats1.json")) == read_file(dir.file("stats8.json")));

  auto rows = read_jsonl(dir.file("curated1.jsonl"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0]["paper_id"] == "r0");
  CHECK(rows[0]["y_con"].is_null());
  CHECK(rows[0]["inbound"].size() == 5);

  json stats = json::parse(read_file(dir.file("stats1.json")));
  CHECK(stats["example_count"] == 10);
}

TEST_CASE("curate can fill in reference summaries from scores") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  write_file(dir.file("scores.jsonl"), ring_scores_jsonl());

  CHECK(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json"), "--scores", dir.file("scores.jsonl"),
                    "--export-controlcode"}) == 0);

  auto rows = read_jsonl(dir.file("curated.jsonl"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0]["y_con"] == "We propose method r0. We improve results.");
  CHECK(rows[0]["y_ctx"] == "Prior work exists.");

  auto pairs = read_jsonl(dir.file("curated.jsonl.controlcode.jsonl"));
  REQUIRE(pairs.size() == 20);
  const std::string source = pairs[0]["source"];
  CHECK(source.rfind("contribution: ", 0) == 0);
  CHECK(pairs[1]["source"].get<std::string>().rfind("context: ", 0) == 0);
  CHECK(pairs[0]["target"] == "We propose method r0. We improve results.");

  json stats = json::parse(read_file(dir.file("stats.json")));
  CHECK(stats["mean_contribution_tokens"].get<double>() > 0.0);

  CHECK(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json"), "--scores", dir.file("scores.jsonl"),
                    "--export-controlcode", dir.file("pairs.jsonl")}) == 0);
  CHECK(read_jsonl(dir.file("pairs.jsonl")).size() == 20);
}

TEST_CASE("exporting training pairs without references fails cleanly") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  CHECK(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json"), "--export-controlcode"}) == 1);
}

TEST_CASE("a missing input file exits with the io code") {
  TempDir dir;
  CHECK(disum::run({"disum", "curate", "--input", dir.file("nope.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json")}) == 2);
  CHECK(disum::run({"disum", "evaluate", "--system", dir.file("nope.jsonl"),
                    "--refs", dir.file("nope2.jsonl"), "--report",
                    dir.file("report.jsonl")}) == 2);
}

TEST_CASE("bad usage exits with the validation code") {
  CHECK(disum::run({"disum"}) == 1);
  CHECK(disum::run({"disum", "no-such-command"}) == 1);
  CHECK(disum::run({"disum", "curate"}) == 1);
  CHECK(disum::run({"disum", "--help"}) == 0);
}

TEST_CASE("unknown config keys are rejected") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  write_file(dir.file("config.json"), R"({"bogus": 1})");
  CHECK(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json"), "--config",
                    dir.file("config.json")}) == 1);

  write_file(dir.file("good.json"), R"({"tokenizer": {"stem": true}})");
  CHECK(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json"), "--config",
                    dir.file("good.json")}) == 0);
}

TEST_CASE("the config file can come from the environment") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  write_file(dir.file("config.json"), R"({"bogus": 1})");
  ::setenv("DISUM_CONFIG", dir.file("config.json").c_str(), 1);
  const int rc = disum::run({"disum", "curate", "--input",
                             dir.file("corpus.jsonl"), "--out",
                             dir.file("curated.jsonl"), "--stats",
                             dir.file("stats.json")});
  ::unsetenv("DISUM_CONFIG");
  CHECK(rc == 1);
}

TEST_CASE("dry runs validate inputs without writing") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  CHECK(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                    "--out", dir.file("curated.jsonl"), "--stats",
                    dir.file("stats.json"), "--dry-run"}) == 0);
  CHECK_FALSE(fs::exists(dir.file("curated.jsonl")));
  CHECK_FALSE(fs::exists(dir.file("stats.json")));
}

TEST_CASE("the full pipeline runs end to end") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  write_file(dir.file("scores.jsonl"), ring_scores_jsonl());

  REQUIRE(disum::run({"disum", "curate", "--input", dir.file("corpus.jsonl"),
                      "--out", dir.file("curated.jsonl"), "--stats",
                      dir.file("stats.json")}) == 0);

  REQUIRE(disum::run({"disum", "refgen", "--corpus", dir.file("curated.jsonl"),
                      "--scores", dir.file("scores.jsonl"), "--out",
                      dir.file("refs.jsonl")}) == 0);
  auto refs = read_jsonl(dir.file("refs.jsonl"));
  REQUIRE(refs.size() == 10);
  CHECK(refs[0]["paper_id"] == "r0");
  CHECK(refs[0]["y_con"] == "We propose method r0. We improve results.");
  CHECK(refs[0]["flags"].empty());

  {
    std::ostringstream sys;
    for (const json& ref : refs) {
      sys << json{{"paper_id", ref["paper_id"]},
                  {"s_con", "We propose a method."},
                  {"s_ctx", "Prior work exists."}}
                 .dump()
          << "\n";
    }
    write_file(dir.file("system.jsonl"), sys.str());
  }

  auto run_eval = [&](const std::string& suffix, const std::string& jobs) {
    return disum::run({"disum", "evaluate", "--system", dir.file("system.jsonl"),
                       "--refs", dir.file("refs.jsonl"), "--report",
                       dir.file("report" + suffix + ".jsonl"), "--aggregate",
                       dir.file("agg" + suffix + ".json"), "--group-by",
                       "domain", "--jobs", jobs});
  };
  REQUIRE(run_eval("1", "1") == 0);
  REQUIRE(run_eval("8", "8") == 0);
  CHECK(read_file(dir.file("report1.jsonl")) == read_file(dir.file("report8.jsonl")));
  CHECK(read_file(dir.file("agg1.json")) == read_file(dir.file("agg8.json")));

  auto reports = read_jsonl(dir.file("report1.jsonl"));
  REQUIRE(reports.size() == 10);
  CHECK(reports[0]["paper_id"] == "r0");
  CHECK(reports[0]["relevance"]["ctx"]["r1"]["f"].get<double>() ==
        doctest::Approx(100.0));
  CHECK(reports[0]["disentanglement"]["d2"].get<double>() ==
        doctest::Approx(100.0));

  json agg = json::parse(read_file(dir.file("agg1.json")));
  CHECK(agg["group_by"] == "domain");
  REQUIRE(agg["groups"].size() == 2);
  CHECK(agg["groups"][0]["group"] == "Biology");
  CHECK(agg["groups"][0]["count"] == 5);
  CHECK(agg["skipped_missing_reference"] == 0);

  REQUIRE(disum::run({"disum", "analyze", "low-scores", "--reports",
                      dir.file("report1.jsonl"), "--metric", "r1-con",
                      "--threshold", "20", "--out",
                      dir.file("low.json")}) == 0);
  json low = json::parse(read_file(dir.file("low.json")));
  CHECK(low["rows"].size() == 2);

  REQUIRE(disum::run({"disum", "analyze", "domains", "--corpus",
                      dir.file("curated.jsonl"), "--out",
                      dir.file("domains.json")}) == 0);
  json domains = json::parse(read_file(dir.file("domains.json")));
  CHECK(domains["total_papers"] == 10);
  REQUIRE(domains["rows"].size() == 2);
  CHECK(domains["rows"][0]["count"] == 5);
}

TEST_CASE("missing references are skipped and surfaced in the aggregate") {
  TempDir dir;
  write_file(dir.file("system.jsonl"),
             json{{"paper_id", "a"}, {"s_con", "x"}, {"s_ctx", "y"}}.dump() +
                 "\n" +
                 json{{"paper_id", "b"}, {"s_con", "x"}, {"s_ctx", "y"}}.dump() +
                 "\n");
  write_file(dir.file("refs.jsonl"),
             json{{"paper_id", "a"}, {"y_con", "x"}, {"y_ctx", "y"}}.dump() +
                 "\n");
  REQUIRE(disum::run({"disum", "evaluate", "--system", dir.file("system.jsonl"),
                      "--refs", dir.file("refs.jsonl"), "--report",
                      dir.file("report.jsonl")}) == 0);
  auto reports = read_jsonl(dir.file("report.jsonl"));
  CHECK(reports.size() == 1);
  json agg = json::parse(read_file(dir.file("report.jsonl.aggregate.json")));
  CHECK(agg["skipped_missing_reference"] == 1);
  CHECK(agg["examples"] == 1);
}

TEST_CASE("analyze bins reads labels against the corpus") {
  TempDir dir;
  write_file(dir.file("corpus.jsonl"), ring_corpus_jsonl());
  std::ostringstream labels;
  for (int i = 0; i < 10; ++i) {
    labels << json{{"paper_id", "r" + std::to_string(i)},
                   {"labels", {1, 0, 0, 0, 0, 0, 0, 1}}}
                  .dump()
           << "\n";
  }
  write_file(dir.file("labels.jsonl"), labels.str());
  REQUIRE(disum::run({"disum", "analyze", "bins", "--corpus",
                      dir.file("corpus.jsonl"), "--labels",
                      dir.file("labels.jsonl"), "--out", dir.file("bins.json"),
                      "--csv", dir.file("bins.csv")}) == 0);
  json bins = json::parse(read_file(dir.file("bins.json")));
  CHECK(bins["papers"] == 10);
  CHECK(bins["total_sentences"] == 80);
  CHECK(bins["bins"][0]["contribution"] == 10);
  CHECK(bins["bins"][8]["contribution"] == 10);

  const std::string csv = read_file(dir.file("bins.csv"));
  CHECK(csv.rfind("bin,contribution,total,fraction\n", 0) == 0);
}

TEST_CASE("judging and loss subcommands work from files") {
  TempDir dir;
  write_file(dir.file("bws.csv"),
             "annotator_id,tuple_id,best_model,worst_model\n"
             "a1,t1,CC,MH\n"
             "a1,t2,CC,MH+INF\n"
             "a2,t1,CC+INF,CC\n"
             "a2,t2,MH,CC\n");
  REQUIRE(disum::run({"disum", "judge", "bws", "--input", dir.file("bws.csv"),
                      "--out", dir.file("bws.json")}) == 0);
  json bws = json::parse(read_file(dir.file("bws.json")));
  CHECK(bws["total_records"] == 4);
  REQUIRE(bws["models"].size() == 4);
  CHECK(bws["models"][0]["model"] == "CC");
  CHECK(bws["models"][0]["rating"].get<double>() == doctest::Approx(0.0));

  write_file(dir.file("prefs.csv"),
             "annotator_id,sample_id,dataset_tag,choice\n"
             "a1,s1,d1,disentangled\n"
             "a1,s2,d1,disentangled\n"
             "a1,s3,d1,abstract\n");
  REQUIRE(disum::run({"disum", "judge", "prefs", "--input",
                      dir.file("prefs.csv"), "--out",
                      dir.file("prefs.json")}) == 0);
  json prefs = json::parse(read_file(dir.file("prefs.json")));
  CHECK(prefs["datasets"][0]["cells"][0]["total"] == 3);

  REQUIRE(disum::run({"disum", "info", "loss", "--ce", "3.0", "--inf", "1.0",
                      "--out", dir.file("loss.json")}) == 0);
  json loss = json::parse(read_file(dir.file("loss.json")));
  CHECK(loss["loss"].get<double>() == doctest::Approx(2.95).epsilon(1e-12));

  std::ostringstream lik;
  lik << R"({"convention": "sequence"})" << "\n";
  lik << R"({"example_id": "e1", "mode": "contribution", "log_p_source": 0.0, "log_p_knowledge": -2.0})"
      << "\n";
  write_file(dir.file("lik.jsonl"), lik.str());
  REQUIRE(disum::run({"disum", "info", "score", "--input", dir.file("lik.jsonl"),
                      "--out", dir.file("score.json")}) == 0);
  json score = json::parse(read_file(dir.file("score.json")));
  CHECK(score["contribution"]["mean"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("label accuracy runs as a nested subcommand") {
  TempDir dir;
  write_file(dir.file("pred.jsonl"),
             json{{"paper_id", "a"}, {"labels", {1, 0, 1, 1}}}.dump() + "\n");
  write_file(dir.file("gold.jsonl"),
             json{{"paper_id", "a"}, {"labels", {1, 0, 0, 1}}}.dump() + "\n");
  REQUIRE(disum::run({"disum", "refgen", "accuracy", "--pred",
                      dir.file("pred.jsonl"), "--gold", dir.file("gold.jsonl"),
                      "--out", dir.file("acc.json")}) == 0);
  json acc = json::parse(read_file(dir.file("acc.json")));
  CHECK(acc["accuracy"].get<double>() == doctest::Approx(0.75));
}
