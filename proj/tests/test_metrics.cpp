#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "disum/error.hpp"
#include "disum/metrics.hpp"
#include "disum/tokenizer.hpp"

using namespace disum;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> words) {
  return {words.begin(), words.end()};
}

// Reference n-gram scorer: materializes every n-gram on both sides and
// counts clipped matches directly.  Slow and obvious on purpose.
RougeScore oracle_rouge_n(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref, std::size_t n) {
  auto grams = [n](const std::vector<std::string>& tokens) {
    std::map<std::vector<std::string>, std::size_t> counts;
    if (tokens.size() >= n) {
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        counts[std::vector<std::string>(tokens.begin() + i,
                                        tokens.begin() + i + n)]++;
      }
    }
    return counts;
  };
  auto cand_counts = grams(cand);
  auto ref_counts = grams(ref);
  std::size_t cand_total = 0, ref_total = 0, matches = 0;
  for (const auto& [gram, count] : cand_counts) {
    cand_total += count;
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) matches += std::min(count, it->second);
  }
  for (const auto& [gram, count] : ref_counts) ref_total += count;
  RougeScore score;
  if (cand_total == 0 || ref_total == 0) return score;
  score.precision = 100.0 * static_cast<double>(matches) / static_cast<double>(cand_total);
  score.recall = 100.0 * static_cast<double>(matches) / static_cast<double>(ref_total);
  if (matches > 0) {
    score.f = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

// Plain recursive LCS, no memo: trustworthy by inspection, usable only
// on short sequences.
std::size_t oracle_lcs(const std::vector<std::string>& a,
                       const std::vector<std::string>& b, std::size_t i,
                       std::size_t j) {
  if (i == 0 || j == 0) return 0;
  if (a[i - 1] == b[j - 1]) return 1 + oracle_lcs(a, b, i - 1, j - 1);
  return std::max(oracle_lcs(a, b, i - 1, j), oracle_lcs(a, b, i, j - 1));
}

RougeScore oracle_rouge_l(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref) {
  RougeScore score;
  if (cand.empty() || ref.empty()) return score;
  const std::size_t lcs = oracle_lcs(cand, ref, cand.size(), ref.size());
  score.precision = 100.0 * static_cast<double>(lcs) / static_cast<double>(cand.size());
  score.recall = 100.0 * static_cast<double>(lcs) / static_cast<double>(ref.size());
  if (lcs > 0) {
    score.f = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  }
  return score;
}

std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t max_len,
                                       int vocab) {
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  std::uniform_int_distribution<int> word_dist(0, vocab - 1);
  std::vector<std::string> tokens(len_dist(rng));
  for (std::string& t : tokens) t = "w" + std::to_string(word_dist(rng));
  return tokens;
}

}  // namespace

TEST_CASE("tokenizer splits on punctuation and lowercases") {
  TokenizerConfig cfg;
  CHECK(tokenize("HVAC-based control", cfg) ==
        toks({"hvac", "based", "control"}));
  CHECK(tokenize("GPT-3 is 2x faster.", cfg) ==
        toks({"gpt", "3", "is", "2x", "faster"}));
  CHECK(tokenize("", cfg).empty());
  CHECK(tokenize("  ...  ", cfg).empty());
}

TEST_CASE("tokenizer keeps multi-byte sequences intact") {
  TokenizerConfig cfg;
  auto tokens = tokenize("na\xc3\xafve approach", cfg);
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0] == "na\xc3\xafve");
  CHECK(tokens[1] == "approach");
}

TEST_CASE("tokenizer honors the lowercase switch") {
  TokenizerConfig cfg;
  cfg.lowercase = false;
  CHECK(tokenize("HVAC Control", cfg) == toks({"HVAC", "Control"}));
}

TEST_CASE("porter stemmer matches the classic outputs") {
  const std::pair<const char*, const char*> cases[] = {
      {"caresses", "caress"}, {"ponies", "poni"},     {"ties", "ti"},
      {"cats", "cat"},        {"feed", "feed"},       {"agreed", "agre"},
      {"motoring", "motor"},  {"sing", "sing"},       {"hopping", "hop"},
      {"tanned", "tan"},      {"falling", "fall"},    {"hissing", "hiss"},
      {"fizzed", "fizz"},     {"failing", "fail"},    {"filing", "file"},
      {"happy", "happi"},     {"sky", "sky"},         {"relational", "relat"},
      {"conditional", "condit"}, {"electricity", "electr"},
      {"hopefulness", "hope"},   {"adjustable", "adjust"},
      {"effective", "effect"},   {"controlling", "control"},
      {"sized", "size"},         {"troubled", "troubl"},
      {"conflated", "conflat"},
  };
  for (const auto& [in, out] : cases) {
    CAPTURE(in);
    CHECK(porter_stem(in) == out);
  }
}

TEST_CASE("stemming folds inflected forms together in the tokenizer") {
  TokenizerConfig cfg;
  cfg.stem = true;
  CHECK(tokenize("controlling controls controlled", cfg) ==
        toks({"control", "control", "control"}));
}

TEST_CASE("unigram overlap on a small fixture") {
  auto cand = toks({"the", "cat", "sat"});
  auto ref = toks({"the", "cat", "ran"});
  RougeScore s = rouge_n(cand, ref, 1);
  CHECK(s.precision == doctest::Approx(66.6667).epsilon(1e-4));
  CHECK(s.recall == doctest::Approx(66.6667).epsilon(1e-4));
  CHECK(s.f == doctest::Approx(66.6667).epsilon(1e-4));
}

TEST_CASE("bigram overlap on a small fixture") {
  auto cand = toks({"the", "cat", "sat"});
  auto ref = toks({"the", "cat", "ran"});
  RougeScore s = rouge_n(cand, ref, 2);
  CHECK(s.precision == doctest::Approx(50.0));
  CHECK(s.recall == doctest::Approx(50.0));
  CHECK(s.f == doctest::Approx(50.0));
}

TEST_CASE("clipping caps repeated n-grams at the reference count") {
  auto cand = toks({"a", "a", "a", "a"});
  auto ref = toks({"a", "a", "b"});
  RougeScore s = rouge_n(cand, ref, 1);
  CHECK(s.precision == doctest::Approx(50.0));
  CHECK(s.recall == doctest::Approx(100.0 * 2 / 3).epsilon(1e-9));
}

TEST_CASE("empty sides score zero everywhere") {
  auto some = toks({"a", "b"});
  std::vector<std::string> none;
  const std::pair<std::vector<std::string>, std::vector<std::string>> pairs[] = {
      {none, some}, {some, none}, {none, none}};
  for (int n : {1, 2}) {
    for (const auto& [cand, ref] : pairs) {
      RougeScore s = rouge_n(cand, ref, n);
      CHECK(s.precision == 0.0);
      CHECK(s.recall == 0.0);
      CHECK(s.f == 0.0);
    }
  }
  RougeScore l = rouge_l(none, some);
  CHECK(l.f == 0.0);
}

TEST_CASE("order shorter than the sequence still scores") {
  auto cand = toks({"a"});
  auto ref = toks({"a", "b"});
  RougeScore s = rouge_n(cand, ref, 2);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
}

TEST_CASE("invalid n is rejected") {
  auto t = toks({"a"});
  CHECK_THROWS_AS(rouge_n(t, t, 0), Error);
  CHECK_THROWS_AS(rouge_n(t, t, -1), Error);
}

TEST_CASE("subsequence overlap on a reordered fixture") {
  auto cand = toks({"a", "b", "c", "d"});
  auto ref = toks({"a", "c", "b", "d"});
  RougeScore s = rouge_l(cand, ref);
  CHECK(s.precision == doctest::Approx(75.0));
  CHECK(s.recall == doctest::Approx(75.0));
  CHECK(s.f == doctest::Approx(75.0));
}

TEST_CASE("swapping candidate and reference swaps precision and recall") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_tokens(rng, 10, 6);
    auto b = random_tokens(rng, 10, 6);
    for (int n : {1, 2}) {
      RougeScore ab = rouge_n(a, b, n);
      RougeScore ba = rouge_n(b, a, n);
      CHECK(ab.precision == ba.recall);
      CHECK(ab.recall == ba.precision);
      CHECK(ab.f == ba.f);
    }
    RougeScore lab = rouge_l(a, b);
    RougeScore lba = rouge_l(b, a);
    CHECK(lab.precision == lba.recall);
    CHECK(lab.f == lba.f);
  }
}

TEST_CASE("random pairs agree exactly with the reference scorers") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 300; ++trial) {
    auto cand = random_tokens(rng, 12, 8);
    auto ref = random_tokens(rng, 12, 8);
    for (int n : {1, 2, 3}) {
      RougeScore got = rouge_n(cand, ref, n);
      RougeScore want = oracle_rouge_n(cand, ref, static_cast<std::size_t>(n));
      CHECK(got.precision == want.precision);
      CHECK(got.recall == want.recall);
      CHECK(got.f == want.f);
    }
    RougeScore got = rouge_l(cand, ref);
    RougeScore want = oracle_rouge_l(cand, ref);
    CHECK(got.precision == want.precision);
    CHECK(got.recall == want.recall);
    CHECK(got.f == want.f);
  }
}

TEST_CASE("scores stay within 0..100 on random inputs") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_tokens(rng, 15, 4);
    auto b = random_tokens(rng, 15, 4);
    for (RougeScore s : {rouge_n(a, b, 1), rouge_n(a, b, 2), rouge_l(a, b)}) {
      CHECK(s.precision >= 0.0);
      CHECK(s.precision <= 100.0);
      CHECK(s.recall >= 0.0);
      CHECK(s.recall <= 100.0);
      CHECK(s.f >= 0.0);
      CHECK(s.f <= 100.0);
    }
  }
}

TEST_CASE("embedding sequences are normalized and validated") {
  EmbeddingSequence seq =
      EmbeddingSequence::from_raw({{3.0, 4.0}, {1.0, 0.0}}, "test");
  REQUIRE(seq.size() == 2);
  CHECK(seq.dim() == 2);
  CHECK(seq[0][0] == doctest::Approx(0.6));
  CHECK(seq[0][1] == doctest::Approx(0.8));

  CHECK_THROWS_AS(EmbeddingSequence::from_raw({{1.0}, {1.0, 2.0}}, "test"), Error);
  CHECK_THROWS_AS(EmbeddingSequence::from_raw({{0.0, 0.0}}, "test"), Error);
  CHECK_THROWS_AS(
      EmbeddingSequence::from_raw({{std::numeric_limits<double>::infinity()}}, "test"),
      Error);
  CHECK_THROWS_AS(EmbeddingSequence::from_raw({{}}, "test"), Error);
}

TEST_CASE("greedy embedding overlap on a hand-checked fixture") {
  const double h = std::sqrt(0.5);
  EmbeddingSequence cand = EmbeddingSequence::from_raw({{1.0, 0.0}}, "cand");
  EmbeddingSequence ref =
      EmbeddingSequence::from_raw({{1.0, 0.0}, {h, h}}, "ref");
  RougeScore s = greedy_embedding_f(cand, ref);
  CHECK(s.precision == doctest::Approx(100.0));
  CHECK(s.recall == doctest::Approx(100.0 * (1.0 + h) / 2.0).epsilon(1e-9));
  const double f = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  CHECK(s.f == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("greedy embedding overlap clamps negative similarities") {
  EmbeddingSequence cand = EmbeddingSequence::from_raw({{1.0, 0.0}}, "cand");
  EmbeddingSequence ref = EmbeddingSequence::from_raw({{-1.0, 0.0}}, "ref");
  RougeScore s = greedy_embedding_f(cand, ref);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f == 0.0);
}

TEST_CASE("greedy embedding overlap rejects dimension mismatches") {
  EmbeddingSequence a = EmbeddingSequence::from_raw({{1.0, 0.0}}, "a");
  EmbeddingSequence b = EmbeddingSequence::from_raw({{1.0, 0.0, 0.0}}, "b");
  CHECK_THROWS_AS(greedy_embedding_f(a, b), Error);
  EmbeddingSequence none;
  RougeScore s = greedy_embedding_f(none, a);
  CHECK(s.f == 0.0);
}

TEST_CASE("identical sequences reach the ceiling") {
  EmbeddingSequence a =
      EmbeddingSequence::from_raw({{1.0, 2.0, 3.0}, {0.5, 0.5, 0.5}}, "a");
  RougeScore s = greedy_embedding_f(a, a);
  CHECK(s.precision == doctest::Approx(100.0));
  CHECK(s.recall == doctest::Approx(100.0));
  CHECK(s.f == doctest::Approx(100.0));
}

TEST_CASE("novelty weighting is the declared affine combination") {
  NouveauWeights weights = NouveauWeights::defaults();
  auto summary = toks({"a", "b"});
  auto same = toks({"a", "b"});
  auto other = toks({"a", "c"});
  const double same_f = rouge_n(summary, same, 1).f;
  const double other_f = rouge_n(summary, other, 1).f;
  CHECK(nouveau_rouge(summary, same, other, 1, weights) ==
        doctest::Approx(same_f - other_f).epsilon(1e-12));
  CHECK(nouveau_rouge(summary, same, other, 1, weights) == doctest::Approx(50.0));

  NouveauWeights custom;
  custom.set(1, {2.0, 0.5, -0.25});
  CHECK(nouveau_rouge(summary, same, other, 1, custom) ==
        doctest::Approx(2.0 + 0.5 * same_f - 0.25 * other_f).epsilon(1e-12));
}

TEST_CASE("missing novelty weights for an order is a config error") {
  NouveauWeights weights;
  weights.set(1, {0.0, 1.0, -1.0});
  auto t = toks({"a"});
  CHECK_THROWS_AS(nouveau_rouge(t, t, t, 2, weights), Error);
  CHECK_THROWS_AS(weights.set(0, {0, 1, -1}), Error);
}

TEST_CASE("purity is the mean of the two side scores") {
  NouveauWeights weights = NouveauWeights::defaults();
  TokenizerConfig tok;
  SummaryPair system{"the model predicts load", "buildings consume energy"};
  SummaryPair reference{"the model predicts thermal load",
                        "buildings consume most energy"};
  auto n_side = [&](const std::string& s, const std::string& same,
                    const std::string& other, int n) {
    auto st = tokenize(s, tok);
    auto samet = tokenize(same, tok);
    auto othert = tokenize(other, tok);
    return nouveau_rouge(st, samet, othert, n, weights);
  };
  for (int n : {1, 2}) {
    const double con = n_side(system.contribution, reference.contribution,
                              reference.context, n);
    const double ctx = n_side(system.context, reference.context,
                              reference.contribution, n);
    CHECK(purity(system, reference, n, weights, tok) ==
          doctest::Approx((con + ctx) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("disentanglement is the complement of cross-side overlap") {
  TokenizerConfig tok;
  SummaryPair system{"the cat sat", "the cat ran"};
  auto con = tokenize(system.contribution, tok);
  auto ctx = tokenize(system.context, tok);
  Disentanglement d = disentanglement(system, tok);
  CHECK(d.d1 == doctest::Approx(100.0 - rouge_n(con, ctx, 1).f).epsilon(1e-12));
  CHECK(d.d2 == doctest::Approx(100.0 - rouge_n(con, ctx, 2).f).epsilon(1e-12));
  CHECK(d.dl == doctest::Approx(100.0 - rouge_l(con, ctx).f).epsilon(1e-12));
  CHECK_FALSE(d.dbs.has_value());
}

TEST_CASE("two empty sides are fully disentangled") {
  TokenizerConfig tok;
  Disentanglement d = disentanglement(SummaryPair{"", ""}, tok);
  CHECK(d.d1 == doctest::Approx(100.0));
  CHECK(d.d2 == doctest::Approx(100.0));
  CHECK(d.dl == doctest::Approx(100.0));
}

TEST_CASE("identical sides are fully entangled") {
  TokenizerConfig tok;
  Disentanglement d = disentanglement(SummaryPair{"same words", "same words"}, tok);
  CHECK(d.d1 == doctest::Approx(0.0));
  CHECK(d.dl == doctest::Approx(0.0));
}

TEST_CASE("disentanglement includes the embedding variant when present") {
  TokenizerConfig tok;
  PairEmbeddings pe;
  pe.s_con = EmbeddingSequence::from_raw({{1.0, 0.0}}, "c");
  pe.s_ctx = EmbeddingSequence::from_raw({{0.0, 1.0}}, "x");
  Disentanglement d = disentanglement(SummaryPair{"a", "b"}, tok, &pe);
  REQUIRE(d.dbs.has_value());
  CHECK(*d.dbs == doctest::Approx(100.0));
}

TEST_CASE("evaluation report carries relevance, purity and separation") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  SummaryPair system{"we propose a new model", "prior work studied models"};
  SummaryPair reference{"we propose a model", "prior work on models"};
  MetricReport r = ev.evaluate_pair("p1", {"Engineering"}, system, reference);
  CHECK(r.paper_id == "p1");
  REQUIRE(r.domains.size() == 1);

  TokenizerConfig tok;
  auto s_con = tokenize(system.contribution, tok);
  auto y_con = tokenize(reference.contribution, tok);
  CHECK(r.con.r1.f == rouge_n(s_con, y_con, 1).f);
  CHECK(r.con.r2.f == rouge_n(s_con, y_con, 2).f);
  CHECK(r.con.rl.f == rouge_l(s_con, y_con).f);
  CHECK_FALSE(r.con.bs.has_value());

  NouveauWeights w = NouveauWeights::defaults();
  CHECK(r.p1 == purity(system, reference, 1, w, tok));
  CHECK(r.p2 == purity(system, reference, 2, w, tok));

  Disentanglement d = disentanglement(system, tok);
  CHECK(r.d1 == d.d1);
  CHECK(r.d2 == d.d2);
  CHECK(r.dl == d.dl);
  CHECK(r.flags.empty());
}

TEST_CASE("empty sides are flagged on the report") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  MetricReport r =
      ev.evaluate_pair("p1", {}, SummaryPair{"", "words"}, SummaryPair{"x", ""});
  CHECK(std::find(r.flags.begin(), r.flags.end(), "empty_s_con") != r.flags.end());
  CHECK(std::find(r.flags.begin(), r.flags.end(), "empty_y_ctx") != r.flags.end());
  CHECK(std::find(r.flags.begin(), r.flags.end(), "empty_s_ctx") == r.flags.end());
}

TEST_CASE("supplied embeddings fill in the embedding scores") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  PairEmbeddings pe;
  pe.s_con = EmbeddingSequence::from_raw({{1.0, 0.0}}, "t");
  pe.y_con = EmbeddingSequence::from_raw({{1.0, 0.0}}, "t");
  pe.s_ctx = EmbeddingSequence::from_raw({{0.0, 1.0}}, "t");
  pe.y_ctx = EmbeddingSequence::from_raw({{0.0, 1.0}}, "t");
  MetricReport r = ev.evaluate_pair("p1", {}, SummaryPair{"a", "b"},
                                    SummaryPair{"a", "b"}, &pe);
  REQUIRE(r.con.bs.has_value());
  CHECK(*r.con.bs == doctest::Approx(100.0));
  REQUIRE(r.ctx.bs.has_value());
  REQUIRE(r.dbs.has_value());
  CHECK(*r.dbs == doctest::Approx(100.0));
}

TEST_CASE("partially supplied embeddings are flagged") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  PairEmbeddings pe;
  pe.s_con = EmbeddingSequence::from_raw({{1.0, 0.0}}, "t");
  MetricReport r = ev.evaluate_pair("p1", {}, SummaryPair{"a", "b"},
                                    SummaryPair{"a", "b"}, &pe);
  CHECK_FALSE(r.con.bs.has_value());
  CHECK(std::find(r.flags.begin(), r.flags.end(), "missing_embeddings") !=
        r.flags.end());
}

TEST_CASE("metric errors are annotated with the paper id") {
  NouveauWeights only_one;
  only_one.set(1, {0, 1, -1});
  Evaluator ev{TokenizerConfig{}, only_one};
  try {
    ev.evaluate_pair("px42", {}, SummaryPair{"a", "b"}, SummaryPair{"a", "b"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("px42") != std::string::npos);
  }
}

TEST_CASE("report json round-trips") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  PairEmbeddings pe;
  pe.s_con = EmbeddingSequence::from_raw({{1.0, 0.0}}, "t");
  pe.y_con = EmbeddingSequence::from_raw({{0.6, 0.8}}, "t");
  pe.s_ctx = EmbeddingSequence::from_raw({{0.0, 1.0}}, "t");
  pe.y_ctx = EmbeddingSequence::from_raw({{1.0, 1.0}}, "t");
  MetricReport r = ev.evaluate_pair("p9", {"Biology", "Medicine"},
                                    SummaryPair{"we bred mice", "mice are small"},
                                    SummaryPair{"mice were bred", "mice, smallest"},
                                    &pe);
  json obj = report_to_json(r);
  MetricReport back = report_from_json(obj, "round-trip");
  CHECK(back.paper_id == r.paper_id);
  CHECK(back.domains == r.domains);
  CHECK(back.con.r1.precision == r.con.r1.precision);
  CHECK(back.con.r1.f == r.con.r1.f);
  CHECK(back.ctx.rl.f == r.ctx.rl.f);
  CHECK(back.p1 == r.p1);
  CHECK(back.p2 == r.p2);
  CHECK(back.d1 == r.d1);
  CHECK(back.dl == r.dl);
  REQUIRE(back.dbs.has_value());
  CHECK(*back.dbs == *r.dbs);
  REQUIRE(back.con.bs.has_value());
  CHECK(*back.con.bs == *r.con.bs);
  CHECK(back.flags == r.flags);
}

TEST_CASE("aggregation is invariant under reordering") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  std::mt19937 rng(4);
  std::vector<MetricReport> reports;
  const char* domains[] = {"Biology", "Medicine", "Engineering"};
  for (int i = 0; i < 25; ++i) {
    auto words = [&](int n) {
      std::string s;
      for (int j = 0; j < n; ++j) {
        if (!s.empty()) s += ' ';
        s += "w" + std::to_string(rng() % 9);
      }
      return s;
    };
    std::vector<std::string> tags{domains[rng() % 3]};
    if (rng() % 2) tags.push_back(domains[rng() % 3]);
    reports.push_back(ev.evaluate_pair(
        "p" + std::to_string(100 + i), tags,
        SummaryPair{words(6), words(6)}, SummaryPair{words(6), words(6)}));
  }
  auto base = aggregate(reports, GroupBy::Domain);
  std::vector<MetricReport> shuffled = reports;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto again = aggregate(shuffled, GroupBy::Domain);
  REQUIRE(base.size() == again.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].group == again[i].group);
    CHECK(base[i].count == again[i].count);
    CHECK(base[i].con_r1 == again[i].con_r1);
    CHECK(base[i].ctx_rl == again[i].ctx_rl);
    CHECK(base[i].p1 == again[i].p1);
    CHECK(base[i].d2 == again[i].d2);
  }
}

TEST_CASE("aggregation counts multi-domain papers once per domain") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  std::vector<MetricReport> reports;
  reports.push_back(ev.evaluate_pair("a", {"X", "Y", "X"}, SummaryPair{"q", "r"},
                                     SummaryPair{"q", "r"}));
  reports.push_back(
      ev.evaluate_pair("b", {}, SummaryPair{"q", "r"}, SummaryPair{"q", "r"}));
  auto groups = aggregate(reports, GroupBy::Domain);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].group == "None");
  CHECK(groups[0].count == 1);
  CHECK(groups[1].group == "X");
  CHECK(groups[1].count == 1);
  CHECK(groups[2].group == "Y");
  CHECK(groups[2].count == 1);

  auto all = aggregate(reports, GroupBy::None);
  REQUIRE(all.size() == 1);
  CHECK(all[0].group == "all");
  CHECK(all[0].count == 2);
}

TEST_CASE("aggregate means match a direct computation") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  std::vector<MetricReport> reports;
  reports.push_back(ev.evaluate_pair("a", {}, SummaryPair{"x y z", "p q"},
                                     SummaryPair{"x y", "p q r"}));
  reports.push_back(ev.evaluate_pair("b", {}, SummaryPair{"x", "q"},
                                     SummaryPair{"x y", "q"}));
  auto all = aggregate(reports, GroupBy::None);
  REQUIRE(all.size() == 1);
  CHECK(all[0].con_r1 ==
        doctest::Approx((reports[0].con.r1.f + reports[1].con.r1.f) / 2.0)
            .epsilon(1e-12));
  CHECK(all[0].p2 ==
        doctest::Approx((reports[0].p2 + reports[1].p2) / 2.0).epsilon(1e-12));
  CHECK_FALSE(all[0].con_bs.has_value());
}

TEST_CASE("metric selectors address report columns by name") {
  Evaluator ev{TokenizerConfig{}, NouveauWeights::defaults()};
  MetricReport r = ev.evaluate_pair("a", {}, SummaryPair{"x y", "p q"},
                                    SummaryPair{"x y", "p q"});
  CHECK(MetricSelector::parse("r1-con").value(r) == r.con.r1.f);
  CHECK(MetricSelector::parse("rl-ctx").value(r) == r.ctx.rl.f);
  CHECK(MetricSelector::parse("p1").value(r) == r.p1);
  CHECK(MetricSelector::parse("d2").value(r) == r.d2);
  CHECK_FALSE(MetricSelector::parse("bs-con").value(r).has_value());
  CHECK_FALSE(MetricSelector::parse("dbs").value(r).has_value());
  CHECK_THROWS_AS(MetricSelector::parse("r9-con"), Error);
  try {
    MetricSelector::parse("nope");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("r1-con") != std::string::npos);
  }
}
