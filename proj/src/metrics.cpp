#include "disum/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_map>

namespace disum {

namespace {

double f_measure(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

RougeScore score_from_counts(std::size_t matches, std::size_t candidate_count,
                             std::size_t reference_count) {
  RougeScore s;
  if (candidate_count == 0 || reference_count == 0) return s;
  s.precision = 100.0 * static_cast<double>(matches) /
                static_cast<double>(candidate_count);
  s.recall = 100.0 * static_cast<double>(matches) /
             static_cast<double>(reference_count);
  s.f = f_measure(s.precision, s.recall);
  return s;
}

// n-grams as joined keys; '\x1f' cannot appear inside a token.
std::unordered_map<std::string, std::size_t> ngram_counts(
    std::span<const std::string> tokens, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

RougeScore rouge_n(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int n) {
  if (n < 1) throw Error::validation("n-gram order must be at least 1");
  const std::size_t un = static_cast<std::size_t>(n);
  if (candidate.size() < un || reference.size() < un) return {};

  auto ref_counts = ngram_counts(reference, un);
  std::size_t matches = 0;
  if (un == 1) {
    for (const std::string& token : candidate) {
      auto it = ref_counts.find(token);
      if (it != ref_counts.end() && it->second > 0) {
        --it->second;
        ++matches;
      }
    }
  } else {
    auto cand_counts = ngram_counts(candidate, un);
    for (const auto& [key, count] : cand_counts) {
      auto it = ref_counts.find(key);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
  }
  return score_from_counts(matches, candidate.size() - un + 1,
                           reference.size() - un + 1);
}

RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return {};
  std::vector<std::size_t> prev(reference.size() + 1, 0);
  std::vector<std::size_t> cur(reference.size() + 1, 0);
  for (std::size_t i = 1; i <= candidate.size(); ++i) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      if (candidate[i - 1] == reference[j - 1]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return score_from_counts(prev[reference.size()], candidate.size(),
                           reference.size());
}

EmbeddingSequence EmbeddingSequence::from_raw(
    std::vector<std::vector<double>> vectors, const std::string& where) {
  EmbeddingSequence seq;
  if (vectors.empty()) return seq;
  seq.dim_ = vectors.front().size();
  if (seq.dim_ == 0) {
    throw Error::validation(where + ": embedding vectors must be non-empty");
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    std::vector<double>& v = vectors[i];
    if (v.size() != seq.dim_) {
      throw Error::validation(where + ": embedding vector " + std::to_string(i) +
                              " has dimension " + std::to_string(v.size()) +
                              ", expected " + std::to_string(seq.dim_));
    }
    double norm_sq = 0.0;
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw Error::validation(where + ": embedding vector " +
                                std::to_string(i) + " has a non-finite entry");
      }
      norm_sq += x * x;
    }
    if (norm_sq <= 0.0) {
      throw Error::validation(where + ": embedding vector " + std::to_string(i) +
                              " has zero norm");
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
  }
  seq.vectors_ = std::move(vectors);
  return seq;
}

namespace {

double clamped_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, 0.0, 1.0);
}

// Mean over `from` of each vector's best match in `against`.
double greedy_side(const EmbeddingSequence& from, const EmbeddingSequence& against) {
  double total = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < against.size(); ++j) {
      best = std::max(best, clamped_cosine(from[i], against[j]));
    }
    total += best;
  }
  return total / static_cast<double>(from.size());
}

}  // namespace

RougeScore greedy_embedding_f(const EmbeddingSequence& candidate,
                              const EmbeddingSequence& reference) {
  if (candidate.empty() || reference.empty()) return {};
  if (candidate.dim() != reference.dim()) {
    throw Error::validation("embedding dimensions differ (" +
                            std::to_string(candidate.dim()) + " vs " +
                            std::to_string(reference.dim()) + ")");
  }
  RougeScore s;
  s.precision = 100.0 * greedy_side(candidate, reference);
  s.recall = 100.0 * greedy_side(reference, candidate);
  s.f = f_measure(s.precision, s.recall);
  return s;
}

NouveauWeights NouveauWeights::defaults() {
  NouveauWeights w;
  w.set(1, NouveauTerms{});
  w.set(2, NouveauTerms{});
  return w;
}

void NouveauWeights::set(int order, NouveauTerms terms) {
  if (order < 1) throw Error::config("novelty weight order must be at least 1");
  for (double a : {terms.a0, terms.a1, terms.a2}) {
    if (!std::isfinite(a)) {
      throw Error::config("novelty weights must be finite");
    }
  }
  by_order_[order] = terms;
}

const NouveauTerms& NouveauWeights::for_order(int order) const {
  auto it = by_order_.find(order);
  if (it == by_order_.end()) {
    throw Error::config("no novelty weights configured for order " +
                        std::to_string(order));
  }
  return it->second;
}

double nouveau_rouge(std::span<const std::string> summary,
                     std::span<const std::string> reference_same,
                     std::span<const std::string> reference_other, int n,
                     const NouveauWeights& weights) {
  const NouveauTerms& terms = weights.for_order(n);
  return terms.a0 + terms.a1 * rouge_n(summary, reference_same, n).f +
         terms.a2 * rouge_n(summary, reference_other, n).f;
}

double purity(const SummaryPair& system, const SummaryPair& reference, int n,
              const NouveauWeights& weights, const TokenizerConfig& tokenizer) {
  const auto s_con = tokenize(system.contribution, tokenizer);
  const auto s_ctx = tokenize(system.context, tokenizer);
  const auto y_con = tokenize(reference.contribution, tokenizer);
  const auto y_ctx = tokenize(reference.context, tokenizer);
  const double n_con = nouveau_rouge(s_con, y_con, y_ctx, n, weights);
  const double n_ctx = nouveau_rouge(s_ctx, y_ctx, y_con, n, weights);
  return (n_con + n_ctx) / 2.0;
}

Disentanglement disentanglement(const SummaryPair& system,
                                const TokenizerConfig& tokenizer,
                                const PairEmbeddings* embeddings) {
  const auto con = tokenize(system.contribution, tokenizer);
  const auto ctx = tokenize(system.context, tokenizer);
  Disentanglement d;
  d.d1 = 100.0 - rouge_n(con, ctx, 1).f;
  d.d2 = 100.0 - rouge_n(con, ctx, 2).f;
  d.dl = 100.0 - rouge_l(con, ctx).f;
  if (embeddings && embeddings->s_con && embeddings->s_ctx) {
    d.dbs = 100.0 - greedy_embedding_f(*embeddings->s_con, *embeddings->s_ctx).f;
  }
  return d;
}

MetricReport Evaluator::evaluate_pair(const std::string& paper_id,
                                      const std::vector<std::string>& domains,
                                      const SummaryPair& system,
                                      const SummaryPair& reference,
                                      const PairEmbeddings* embeddings) const {
  try {
    MetricReport report;
    report.paper_id = paper_id;
    report.domains = domains;

    const auto s_con = tokenize(system.contribution, tokenizer_);
    const auto s_ctx = tokenize(system.context, tokenizer_);
    const auto y_con = tokenize(reference.contribution, tokenizer_);
    const auto y_ctx = tokenize(reference.context, tokenizer_);
    if (s_con.empty()) report.flags.push_back("empty_s_con");
    if (s_ctx.empty()) report.flags.push_back("empty_s_ctx");
    if (y_con.empty()) report.flags.push_back("empty_y_con");
    if (y_ctx.empty()) report.flags.push_back("empty_y_ctx");

    report.con.r1 = rouge_n(s_con, y_con, 1);
    report.con.r2 = rouge_n(s_con, y_con, 2);
    report.con.rl = rouge_l(s_con, y_con);
    report.ctx.r1 = rouge_n(s_ctx, y_ctx, 1);
    report.ctx.r2 = rouge_n(s_ctx, y_ctx, 2);
    report.ctx.rl = rouge_l(s_ctx, y_ctx);

    bool embeddings_incomplete = false;
    if (embeddings) {
      if (embeddings->s_con && embeddings->y_con) {
        report.con.bs = greedy_embedding_f(*embeddings->s_con, *embeddings->y_con).f;
      } else {
        embeddings_incomplete = true;
      }
      if (embeddings->s_ctx && embeddings->y_ctx) {
        report.ctx.bs = greedy_embedding_f(*embeddings->s_ctx, *embeddings->y_ctx).f;
      } else {
        embeddings_incomplete = true;
      }
      if (!embeddings->s_con || !embeddings->s_ctx) embeddings_incomplete = true;
    }

    report.p1 = purity(system, reference, 1, weights_, tokenizer_);
    report.p2 = purity(system, reference, 2, weights_, tokenizer_);

    const Disentanglement d = disentanglement(system, tokenizer_, embeddings);
    report.d1 = d.d1;
    report.d2 = d.d2;
    report.dl = d.dl;
    report.dbs = d.dbs;

    if (embeddings_incomplete) report.flags.push_back("missing_embeddings");
    return report;
  } catch (const Error& e) {
    throw Error(e.kind(), "paper '" + paper_id + "': " + e.what());
  }
}

std::vector<AggregateGroup> aggregate(std::span<const MetricReport> reports,
                                      GroupBy group_by) {
  // Folding in sorted paper order makes the result independent of the
  // order the reports came in, bit for bit.
  std::vector<const MetricReport*> order;
  order.reserve(reports.size());
  for (const MetricReport& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const MetricReport* a, const MetricReport* b) {
                     return a->paper_id < b->paper_id;
                   });

  std::map<std::string, AggregateGroup> groups;
  auto add = [&](const std::string& name, const MetricReport& r) {
    AggregateGroup& g = groups[name];
    g.group = name;
    ++g.count;
    g.con_r1 += r.con.r1.f;
    g.con_r2 += r.con.r2.f;
    g.con_rl += r.con.rl.f;
    g.ctx_r1 += r.ctx.r1.f;
    g.ctx_r2 += r.ctx.r2.f;
    g.ctx_rl += r.ctx.rl.f;
    if (r.con.bs) {
      g.con_bs = g.con_bs.value_or(0.0) + *r.con.bs;
      ++g.con_bs_count;
    }
    if (r.ctx.bs) {
      g.ctx_bs = g.ctx_bs.value_or(0.0) + *r.ctx.bs;
      ++g.ctx_bs_count;
    }
    if (r.dbs) {
      g.dbs = g.dbs.value_or(0.0) + *r.dbs;
      ++g.dbs_count;
    }
    g.p1 += r.p1;
    g.p2 += r.p2;
    g.d1 += r.d1;
    g.d2 += r.d2;
    g.dl += r.dl;
  };

  for (const MetricReport* r : order) {
    if (group_by == GroupBy::None) {
      add("all", *r);
    } else if (r->domains.empty()) {
      add("None", *r);
    } else {
      std::set<std::string> unique(r->domains.begin(), r->domains.end());
      for (const std::string& d : unique) add(d, *r);
    }
  }

  std::vector<AggregateGroup> out;
  out.reserve(groups.size());
  for (auto& [name, g] : groups) {
    const double n = static_cast<double>(g.count);
    g.con_r1 /= n;
    g.con_r2 /= n;
    g.con_rl /= n;
    g.ctx_r1 /= n;
    g.ctx_r2 /= n;
    g.ctx_rl /= n;
    if (g.con_bs) *g.con_bs /= static_cast<double>(g.con_bs_count);
    if (g.ctx_bs) *g.ctx_bs /= static_cast<double>(g.ctx_bs_count);
    if (g.dbs) *g.dbs /= static_cast<double>(g.dbs_count);
    g.p1 /= n;
    g.p2 /= n;
    g.d1 /= n;
    g.d2 /= n;
    g.dl /= n;
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

json rouge_to_json(const RougeScore& s) {
  return {{"p", s.precision}, {"r", s.recall}, {"f", s.f}};
}

json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

json side_to_json(const SideRelevance& side) {
  json obj;
  obj["r1"] = rouge_to_json(side.r1);
  obj["r2"] = rouge_to_json(side.r2);
  obj["rl"] = rouge_to_json(side.rl);
  obj["bs"] = optional_to_json(side.bs);
  return obj;
}

RougeScore rouge_from_json(const json& obj, const char* key,
                           const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_object()) {
    throw Error::validation(where + ": field '" + std::string(key) +
                            "' must be an object");
  }
  RougeScore s;
  s.precision = require_number(v, "p", where);
  s.recall = require_number(v, "r", where);
  s.f = require_number(v, "f", where);
  return s;
}

std::optional<double> optional_number(const json& obj, const char* key,
                                      const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw Error::validation(where + ": field '" + std::string(key) +
                            "' must be a number or null");
  }
  return it->get<double>();
}

SideRelevance side_from_json(const json& obj, const char* key,
                             const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_object()) {
    throw Error::validation(where + ": field '" + std::string(key) +
                            "' must be an object");
  }
  SideRelevance side;
  side.r1 = rouge_from_json(v, "r1", where);
  side.r2 = rouge_from_json(v, "r2", where);
  side.rl = rouge_from_json(v, "rl", where);
  side.bs = optional_number(v, "bs", where);
  return side;
}

}  // namespace

json report_to_json(const MetricReport& report) {
  json obj;
  obj["paper_id"] = report.paper_id;
  obj["domains"] = report.domains;
  obj["relevance"] = {{"con", side_to_json(report.con)},
                      {"ctx", side_to_json(report.ctx)}};
  obj["purity"] = {{"p1", report.p1}, {"p2", report.p2}};
  json dis;
  dis["d1"] = report.d1;
  dis["d2"] = report.d2;
  dis["dl"] = report.dl;
  dis["dbs"] = optional_to_json(report.dbs);
  obj["disentanglement"] = dis;
  obj["flags"] = report.flags;
  return obj;
}

MetricReport report_from_json(const json& obj, const std::string& where) {
  MetricReport report;
  report.paper_id = require_nonempty_string(obj, "paper_id", where);
  report.domains = optional_string_array(obj, "domains", where);

  const json& rel = require_field(obj, "relevance", where);
  if (!rel.is_object()) {
    throw Error::validation(where + ": field 'relevance' must be an object");
  }
  report.con = side_from_json(rel, "con", where);
  report.ctx = side_from_json(rel, "ctx", where);

  const json& pur = require_field(obj, "purity", where);
  if (!pur.is_object()) {
    throw Error::validation(where + ": field 'purity' must be an object");
  }
  report.p1 = require_number(pur, "p1", where);
  report.p2 = require_number(pur, "p2", where);

  const json& dis = require_field(obj, "disentanglement", where);
  if (!dis.is_object()) {
    throw Error::validation(where + ": field 'disentanglement' must be an object");
  }
  report.d1 = require_number(dis, "d1", where);
  report.d2 = require_number(dis, "d2", where);
  report.dl = require_number(dis, "dl", where);
  report.dbs = optional_number(dis, "dbs", where);

  report.flags = optional_string_array(obj, "flags", where);
  return report;
}

json aggregate_to_json(std::span<const AggregateGroup> groups, GroupBy group_by) {
  json obj;
  obj["group_by"] = group_by == GroupBy::Domain ? "domain" : "none";
  json arr = json::array();
  for (const AggregateGroup& g : groups) {
    json row;
    row["group"] = g.group;
    row["count"] = g.count;
    row["relevance"] = {
        {"con",
         {{"r1", g.con_r1},
          {"r2", g.con_r2},
          {"rl", g.con_rl},
          {"bs", optional_to_json(g.con_bs)}}},
        {"ctx",
         {{"r1", g.ctx_r1},
          {"r2", g.ctx_r2},
          {"rl", g.ctx_rl},
          {"bs", optional_to_json(g.ctx_bs)}}}};
    row["purity"] = {{"p1", g.p1}, {"p2", g.p2}};
    row["disentanglement"] = {{"d1", g.d1},
                              {"d2", g.d2},
                              {"dl", g.dl},
                              {"dbs", optional_to_json(g.dbs)}};
    row["embedded"] = {{"con_bs", g.con_bs_count},
                       {"ctx_bs", g.ctx_bs_count},
                       {"dbs", g.dbs_count}};
    arr.push_back(std::move(row));
  }
  obj["groups"] = std::move(arr);
  return obj;
}

namespace {

constexpr std::array<const char*, 14> kMetricNames = {
    "r1-con", "r2-con", "rl-con", "bs-con", "r1-ctx", "r2-ctx", "rl-ctx",
    "bs-ctx", "p1",     "p2",     "d1",     "d2",     "dl",     "dbs"};

}  // namespace

MetricSelector MetricSelector::parse(const std::string& name) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (name == kMetricNames[i]) {
      return MetricSelector(name, static_cast<int>(i));
    }
  }
  std::string valid;
  for (const char* n : kMetricNames) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw Error::validation("unknown metric '" + name + "' (valid: " + valid + ")");
}

std::optional<double> MetricSelector::value(const MetricReport& r) const {
  switch (field_) {
    case 0: return r.con.r1.f;
    case 1: return r.con.r2.f;
    case 2: return r.con.rl.f;
    case 3: return r.con.bs;
    case 4: return r.ctx.r1.f;
    case 5: return r.ctx.r2.f;
    case 6: return r.ctx.rl.f;
    case 7: return r.ctx.bs;
    case 8: return r.p1;
    case 9: return r.p2;
    case 10: return r.d1;
    case 11: return r.d2;
    case 12: return r.dl;
    case 13: return r.dbs;
  }
  return std::nullopt;
}

}  // namespace disum
