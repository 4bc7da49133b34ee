#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disum/jsonl.hpp"
#include "disum/summary.hpp"
#include "disum/tokenizer.hpp"

namespace disum {

// Precision, recall and F1 on the usual 0..100 scale.
struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// N-gram overlap with clipped counts.  Either side empty (or shorter
// than n) scores zero across the board.
RougeScore rouge_n(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int n);

// Summary-level longest-common-subsequence overlap.
RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference);

// Sentence vectors, L2-normalized on construction.
class EmbeddingSequence {
 public:
  EmbeddingSequence() = default;

  // Validates that rows are non-empty, same-dimensional, finite and
  // not all-zero; "where" seeds error messages.
  static EmbeddingSequence from_raw(std::vector<std::vector<double>> vectors,
                                    const std::string& where);

  std::size_t size() const { return vectors_.size(); }
  bool empty() const { return vectors_.empty(); }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& operator[](std::size_t i) const { return vectors_[i]; }

 private:
  std::vector<std::vector<double>> vectors_;
  std::size_t dim_ = 0;
};

// Greedy soft alignment: every reference vector matches its best
// candidate (recall) and vice versa (precision); cosine similarities
// are clamped to [0, 1] and averaged, F1 as usual.  Dimensions must
// agree when both sides are non-empty.
RougeScore greedy_embedding_f(const EmbeddingSequence& candidate,
                              const EmbeddingSequence& reference);

// Per-order coefficients of the novelty-weighted score.
struct NouveauTerms {
  double a0 = 0.0;
  double a1 = 1.0;
  double a2 = -1.0;
};

// The published coefficient sets are not public, so callers configure
// them; the default rewards same-side overlap and penalizes the other
// side one-for-one.
class NouveauWeights {
 public:
  static NouveauWeights defaults();

  void set(int order, NouveauTerms terms);
  bool has(int order) const { return by_order_.count(order) != 0; }
  const NouveauTerms& for_order(int order) const;  // Config error when missing
  const std::map<int, NouveauTerms>& all() const { return by_order_; }

 private:
  std::map<int, NouveauTerms> by_order_;
};

// a0 + a1 * R_n(s, y_same) + a2 * R_n(s, y_other), all F-scores.
double nouveau_rouge(std::span<const std::string> summary,
                     std::span<const std::string> reference_same,
                     std::span<const std::string> reference_other, int n,
                     const NouveauWeights& weights);

// Mean of the two sides' novelty-weighted scores at order n.
double purity(const SummaryPair& system, const SummaryPair& reference, int n,
              const NouveauWeights& weights, const TokenizerConfig& tokenizer);

// Embeddings for both sides of a system/reference pair, keyed the way
// the evaluation needs them; any subset may be present.
struct PairEmbeddings {
  std::optional<EmbeddingSequence> s_con, s_ctx, y_con, y_ctx;
};

struct Disentanglement {
  double d1 = 0.0;
  double d2 = 0.0;
  double dl = 0.0;
  std::optional<double> dbs;
};

// How little the two system sides overlap: 100 minus the ROUGE overlap
// between them, per variant.  Two empty sides count as fully disjoint.
Disentanglement disentanglement(const SummaryPair& system,
                                const TokenizerConfig& tokenizer,
                                const PairEmbeddings* embeddings = nullptr);

struct SideRelevance {
  RougeScore r1, r2, rl;
  std::optional<double> bs;  // embedding F1, when embeddings are supplied
};

struct MetricReport {
  std::string paper_id;
  std::vector<std::string> domains;
  SideRelevance con, ctx;
  double p1 = 0.0, p2 = 0.0;
  double d1 = 0.0, d2 = 0.0, dl = 0.0;
  std::optional<double> dbs;
  std::vector<std::string> flags;
};

class Evaluator {
 public:
  Evaluator(TokenizerConfig tokenizer, NouveauWeights weights)
      : tokenizer_(tokenizer), weights_(std::move(weights)) {}

  const TokenizerConfig& tokenizer() const { return tokenizer_; }
  const NouveauWeights& weights() const { return weights_; }

  // Scores one system pair against its reference pair.  Errors from
  // the underlying metrics are annotated with paper_id.
  MetricReport evaluate_pair(const std::string& paper_id,
                             const std::vector<std::string>& domains,
                             const SummaryPair& system,
                             const SummaryPair& reference,
                             const PairEmbeddings* embeddings = nullptr) const;

 private:
  TokenizerConfig tokenizer_;
  NouveauWeights weights_;
};

enum class GroupBy { None, Domain };

// Unweighted means of the reported scores.  A paper tagged with
// several domains counts once in each; papers without domains fall
// into "None".  Optional scores average over the rows that have them.
struct AggregateGroup {
  std::string group;
  std::size_t count = 0;
  double con_r1 = 0, con_r2 = 0, con_rl = 0;
  double ctx_r1 = 0, ctx_r2 = 0, ctx_rl = 0;
  std::optional<double> con_bs, ctx_bs, dbs;
  std::size_t con_bs_count = 0, ctx_bs_count = 0, dbs_count = 0;
  double p1 = 0, p2 = 0;
  double d1 = 0, d2 = 0, dl = 0;
};

std::vector<AggregateGroup> aggregate(std::span<const MetricReport> reports,
                                      GroupBy group_by);

json report_to_json(const MetricReport& report);
MetricReport report_from_json(const json& obj, const std::string& where);
json aggregate_to_json(std::span<const AggregateGroup> groups, GroupBy group_by);

// Names one column of a MetricReport, e.g. "r1-con", "p2" or "dl".
class MetricSelector {
 public:
  static MetricSelector parse(const std::string& name);  // lists valid names on error

  const std::string& name() const { return name_; }
  std::optional<double> value(const MetricReport& report) const;

 private:
  explicit MetricSelector(std::string name, int field)
      : name_(std::move(name)), field_(field) {}
  std::string name_;
  int field_;
};

}  // namespace disum
