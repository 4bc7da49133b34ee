#include "disum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <utility>

#include "disum/parallel.hpp"

namespace disum {

namespace {

bool has_visible_char(const std::string& text) {
  for (unsigned char c : text) {
    if (!std::isspace(c)) return true;
  }
  return false;
}

std::vector<CitationLink> parse_links(const json& obj, const char* key,
                                      const std::string& where,
                                      const std::string& self_id,
                                      std::size_t body_size, bool check_range) {
  std::vector<CitationLink> links;
  auto it = obj.find(key);
  if (it == obj.end()) return links;
  if (!it->is_array()) {
    throw Error::validation(where + ": field '" + key + "' must be an array");
  }
  links.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& el = (*it)[i];
    const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    if (!el.is_object()) {
      throw Error::validation(where + ": field '" + path + "' must be an object");
    }
    CitationLink link;

    auto id_it = el.find("id");
    if (id_it == el.end() || !id_it->is_string() ||
        id_it->get<std::string>().empty()) {
      throw Error::validation(where + ": field '" + path +
                              ".id' must be a non-empty string");
    }
    link.linked_paper_id = id_it->get<std::string>();
    if (link.linked_paper_id == self_id) {
      throw Error::validation(where + ": field '" + path +
                              ".id' must not reference the record itself");
    }

    auto count_it = el.find("cited_count");
    if (count_it == el.end() || !count_it->is_number_integer() ||
        count_it->get<std::int64_t>() < 0) {
      throw Error::validation(where + ": field '" + path +
                              ".cited_count' must be a non-negative integer");
    }
    link.linked_citation_count = count_it->get<std::int64_t>();

    auto mentions_it = el.find("mentions");
    if (mentions_it == el.end() || !mentions_it->is_array() || mentions_it->empty()) {
      throw Error::validation(where + ": field '" + path +
                              ".mentions' must be a non-empty array");
    }
    link.mention_sentence_indices.reserve(mentions_it->size());
    for (std::size_t m = 0; m < mentions_it->size(); ++m) {
      const json& mv = (*mentions_it)[m];
      const std::string mpath = path + ".mentions[" + std::to_string(m) + "]";
      if (!mv.is_number_integer() || mv.get<std::int64_t>() < 0) {
        throw Error::validation(where + ": field '" + mpath +
                                "' must be a non-negative integer");
      }
      std::size_t idx = static_cast<std::size_t>(mv.get<std::int64_t>());
      if (!link.mention_sentence_indices.empty() &&
          idx <= link.mention_sentence_indices.back()) {
        throw Error::validation(where + ": field '" + path +
                                ".mentions' must be strictly increasing");
      }
      if (check_range && idx >= body_size) {
        throw Error::validation(where + ": field '" + mpath +
                                "' is out of range for a body of " +
                                std::to_string(body_size) + " sentences");
      }
      link.mention_sentence_indices.push_back(idx);
    }
    links.push_back(std::move(link));
  }
  return links;
}

}  // namespace

PaperRecord parse_paper_record(const json& obj, const std::string& where) {
  PaperRecord rec;
  rec.paper_id = require_nonempty_string(obj, "paper_id", where);
  rec.title = optional_string(obj, "title", where);
  rec.abstract_text = optional_string(obj, "abstract", where);

  if (auto it = obj.find("body"); it != obj.end()) {
    if (!it->is_array()) {
      throw Error::validation(where + ": field 'body' must be an array");
    }
    rec.body_sentences.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& el = (*it)[i];
      const std::string path = "body[" + std::to_string(i) + "]";
      if (!el.is_object()) {
        throw Error::validation(where + ": field '" + path + "' must be an object");
      }
      BodySentence sentence;
      sentence.section = optional_string(el, "section", where);
      auto text_it = el.find("text");
      if (text_it == el.end() || !text_it->is_string()) {
        throw Error::validation(where + ": field '" + path +
                                ".text' must be a string");
      }
      sentence.text = text_it->get<std::string>();
      rec.body_sentences.push_back(std::move(sentence));
    }
  }

  rec.domains = optional_string_array(obj, "domains", where);
  rec.outbound_links = parse_links(obj, "outbound", where, rec.paper_id,
                                   rec.body_sentences.size(), true);
  rec.inbound_links =
      parse_links(obj, "inbound", where, rec.paper_id, 0, false);
  return rec;
}

std::optional<PaperRecord> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      issues_.push_back({line_no_, "invalid JSON"});
      continue;
    }
    if (!obj.is_object()) {
      issues_.push_back({line_no_, "expected a JSON object"});
      continue;
    }
    try {
      return parse_paper_record(obj, "line " + std::to_string(line_no_));
    } catch (const Error& e) {
      issues_.push_back({line_no_, e.what()});
    }
  }
  return std::nullopt;
}

CorpusLoadResult load_corpus(std::istream& in) {
  CorpusLoadResult result;
  CorpusReader reader(in);
  while (auto rec = reader.next()) {
    result.records.push_back(std::move(*rec));
  }
  result.issues = reader.issues();
  return result;
}

bool is_eligible(const PaperRecord& record, std::size_t min_citations) {
  return !record.abstract_text.empty() && !record.body_sentences.empty() &&
         record.inbound_links.size() >= min_citations &&
         record.outbound_links.size() >= min_citations;
}

std::vector<CitationLink> truncate_citations(std::vector<CitationLink> links,
                                             std::size_t k) {
  if (k == 0) throw Error::validation("citation cap must be at least 1");
  if (links.size() <= k) return links;
  std::sort(links.begin(), links.end(),
            [](const CitationLink& a, const CitationLink& b) {
              if (a.linked_citation_count != b.linked_citation_count) {
                return a.linked_citation_count > b.linked_citation_count;
              }
              return a.linked_paper_id < b.linked_paper_id;
            });
  links.resize(k);
  return links;
}

CitationContext extract_citation_context(const PaperRecord& mentioning_paper,
                                         const CitationLink& link) {
  CitationContext ctx;
  ctx.linked_paper_id = link.linked_paper_id;
  for (std::size_t idx : link.mention_sentence_indices) {
    if (idx >= mentioning_paper.body_sentences.size()) {
      throw Error::validation(
          "paper '" + mentioning_paper.paper_id + "': mention index " +
          std::to_string(idx) + " is out of range for a body of " +
          std::to_string(mentioning_paper.body_sentences.size()) + " sentences");
    }
    if (!ctx.text.empty()) ctx.text.push_back(' ');
    ctx.text += mentioning_paper.body_sentences[idx].text;
  }
  return ctx;
}

namespace {

struct CurateUnit {
  std::optional<CuratedExample> example;
  std::size_t dangling = 0;
  std::size_t invalid = 0;
};

using CorpusIndex = std::unordered_map<std::string, const PaperRecord*>;

CurateUnit curate_one(const PaperRecord& rec, const CorpusIndex& index,
                      const CurateOptions& opt) {
  CurateUnit unit;
  auto usable = [&](const std::vector<CitationLink>& links, bool inbound_side) {
    std::vector<CitationLink> kept;
    kept.reserve(links.size());
    for (const CitationLink& link : links) {
      auto it = index.find(link.linked_paper_id);
      if (it == index.end()) {
        ++unit.dangling;
        continue;
      }
      const PaperRecord& mentioning = inbound_side ? *it->second : rec;
      bool ok = true;
      bool visible = false;
      for (std::size_t idx : link.mention_sentence_indices) {
        if (idx >= mentioning.body_sentences.size()) {
          ok = false;
          break;
        }
        visible = visible || has_visible_char(mentioning.body_sentences[idx].text);
      }
      if (!ok || !visible) {
        ++unit.invalid;
        continue;
      }
      kept.push_back(link);
    }
    return kept;
  };

  std::vector<CitationLink> in_kept = usable(rec.inbound_links, true);
  std::vector<CitationLink> out_kept = usable(rec.outbound_links, false);
  if (rec.abstract_text.empty() || rec.body_sentences.empty()) return unit;
  if (in_kept.size() < opt.min_citations || out_kept.size() < opt.min_citations) {
    return unit;
  }

  CuratedExample ex;
  ex.paper_id = rec.paper_id;
  ex.abstract_text = rec.abstract_text;
  for (const BodySentence& s : rec.body_sentences) {
    if (!ex.source_text.empty()) ex.source_text.push_back(' ');
    ex.source_text += s.text;
  }
  if (!has_visible_char(ex.source_text)) return unit;

  for (const CitationLink& link :
       truncate_citations(std::move(in_kept), opt.max_citations)) {
    ex.inbound.push_back(
        extract_citation_context(*index.at(link.linked_paper_id), link));
  }
  for (const CitationLink& link :
       truncate_citations(std::move(out_kept), opt.max_citations)) {
    ex.outbound.push_back(extract_citation_context(rec, link));
  }
  ex.domains = rec.domains;
  unit.example = std::move(ex);
  return unit;
}

}  // namespace

CurateResult curate(std::span<const PaperRecord> corpus,
                    const CurateOptions& options) {
  if (options.max_citations == 0) {
    throw Error::config("max_citations must be at least 1");
  }
  if (options.max_citations < options.min_citations) {
    throw Error::config("max_citations must not be smaller than min_citations");
  }

  CurateResult result;
  CorpusIndex index;
  index.reserve(corpus.size());
  std::vector<const PaperRecord*> order;
  order.reserve(corpus.size());
  for (const PaperRecord& rec : corpus) {
    auto [it, inserted] = index.emplace(rec.paper_id, &rec);
    if (!inserted) {
      ++result.warnings.duplicate_paper_ids;
      continue;
    }
    order.push_back(&rec);
  }
  std::sort(order.begin(), order.end(),
            [](const PaperRecord* a, const PaperRecord* b) {
              return a->paper_id < b->paper_id;
            });

  std::vector<CurateUnit> units = parallel_map(
      order,
      [&](const PaperRecord* rec) { return curate_one(*rec, index, options); },
      options.jobs);

  for (CurateUnit& unit : units) {
    result.warnings.dangling_links += unit.dangling;
    result.warnings.invalid_mentions += unit.invalid;
    if (unit.example) result.examples.push_back(std::move(*unit.example));
  }
  result.stats = compute_stats(result.examples, options.tokenizer);
  return result;
}

CorpusStats compute_stats(std::span<const CuratedExample> examples,
                          const TokenizerConfig& tokenizer) {
  CorpusStats stats;
  stats.example_count = examples.size();
  if (examples.empty()) return stats;

  std::uint64_t source = 0, inbound = 0, outbound = 0, con = 0, ctx = 0;
  for (const CuratedExample& ex : examples) {
    source += tokenize(ex.source_text, tokenizer).size();
    for (const CitationContext& c : ex.inbound) {
      inbound += tokenize(c.text, tokenizer).size();
    }
    for (const CitationContext& c : ex.outbound) {
      outbound += tokenize(c.text, tokenizer).size();
    }
    if (ex.references) {
      con += tokenize(ex.references->contribution, tokenizer).size();
      ctx += tokenize(ex.references->context, tokenizer).size();
    }
  }
  const double n = static_cast<double>(examples.size());
  stats.mean_source_tokens = static_cast<double>(source) / n;
  stats.mean_inbound_tokens = static_cast<double>(inbound) / n;
  stats.mean_outbound_tokens = static_cast<double>(outbound) / n;
  stats.mean_contribution_tokens = static_cast<double>(con) / n;
  stats.mean_context_tokens = static_cast<double>(ctx) / n;
  return stats;
}

namespace {

json contexts_to_json(const std::vector<CitationContext>& contexts) {
  json arr = json::array();
  for (const CitationContext& c : contexts) {
    arr.push_back({{"id", c.linked_paper_id}, {"text", c.text}});
  }
  return arr;
}

std::vector<CitationContext> contexts_from_json(const json& obj, const char* key,
                                                const std::string& where) {
  std::vector<CitationContext> out;
  const json& arr = require_array(obj, key, where);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& el = arr[i];
    const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    if (!el.is_object()) {
      throw Error::validation(where + ": field '" + path + "' must be an object");
    }
    CitationContext c;
    c.linked_paper_id = require_nonempty_string(el, "id", where);
    c.text = require_string(el, "text", where);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

json curated_to_json(const CuratedExample& example) {
  json obj;
  obj["paper_id"] = example.paper_id;
  obj["abstract"] = example.abstract_text;
  obj["source_text"] = example.source_text;
  obj["inbound"] = contexts_to_json(example.inbound);
  obj["outbound"] = contexts_to_json(example.outbound);
  if (example.references) {
    obj["y_con"] = example.references->contribution;
    obj["y_ctx"] = example.references->context;
  } else {
    obj["y_con"] = nullptr;
    obj["y_ctx"] = nullptr;
  }
  obj["domains"] = example.domains;
  return obj;
}

CuratedExample curated_from_json(const json& obj, const std::string& where) {
  CuratedExample ex;
  ex.paper_id = require_nonempty_string(obj, "paper_id", where);
  ex.abstract_text = require_string(obj, "abstract", where);
  ex.source_text = require_string(obj, "source_text", where);
  ex.inbound = contexts_from_json(obj, "inbound", where);
  ex.outbound = contexts_from_json(obj, "outbound", where);

  const json& con = require_field(obj, "y_con", where);
  const json& ctx = require_field(obj, "y_ctx", where);
  if (con.is_null() != ctx.is_null()) {
    throw Error::validation(where +
                            ": fields 'y_con' and 'y_ctx' must be both set or "
                            "both null");
  }
  if (!con.is_null()) {
    if (!con.is_string() || !ctx.is_string()) {
      throw Error::validation(where +
                              ": fields 'y_con' and 'y_ctx' must be strings");
    }
    ex.references = SummaryPair{con.get<std::string>(), ctx.get<std::string>()};
  }
  ex.domains = optional_string_array(obj, "domains", where);
  return ex;
}

json stats_to_json(const CorpusStats& stats) {
  json obj;
  obj["example_count"] = stats.example_count;
  obj["mean_source_tokens"] = stats.mean_source_tokens;
  obj["mean_inbound_tokens"] = stats.mean_inbound_tokens;
  obj["mean_outbound_tokens"] = stats.mean_outbound_tokens;
  obj["mean_contribution_tokens"] = stats.mean_contribution_tokens;
  obj["mean_context_tokens"] = stats.mean_context_tokens;
  return obj;
}

std::size_t export_controlcode(std::span<const CuratedExample> examples,
                               std::ostream& out) {
  std::size_t lines = 0;
  for (const CuratedExample& ex : examples) {
    if (!ex.references) {
      throw Error::validation("example '" + ex.paper_id +
                              "' has no reference summaries to export");
    }
    write_jsonl_line(out, {{"source", "contribution: " + ex.source_text},
                           {"target", ex.references->contribution}});
    write_jsonl_line(out, {{"source", "context: " + ex.source_text},
                           {"target", ex.references->context}});
    lines += 2;
  }
  return lines;
}

}  // namespace disum
