#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disum/jsonl.hpp"
#include "disum/summary.hpp"
#include "disum/tokenizer.hpp"

namespace disum {

// A citation edge.  For outbound links the mention indices point into
// this paper's own body; for inbound links they point into the body of
// the citing paper named by linked_paper_id.
struct CitationLink {
  std::string linked_paper_id;
  std::int64_t linked_citation_count = 0;
  std::vector<std::size_t> mention_sentence_indices;
};

struct BodySentence {
  std::string section;
  std::string text;
};

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::string abstract_text;
  std::vector<BodySentence> body_sentences;
  std::vector<std::string> domains;
  std::vector<CitationLink> outbound_links;
  std::vector<CitationLink> inbound_links;
};

// The sentences around one citation, joined into a single passage.
struct CitationContext {
  std::string linked_paper_id;
  std::string text;
};

struct CuratedExample {
  std::string paper_id;
  std::string abstract_text;
  std::string source_text;
  std::vector<CitationContext> inbound;
  std::vector<CitationContext> outbound;
  std::optional<SummaryPair> references;
  std::vector<std::string> domains;
};

struct CorpusStats {
  std::size_t example_count = 0;
  double mean_source_tokens = 0.0;
  double mean_inbound_tokens = 0.0;
  double mean_outbound_tokens = 0.0;
  double mean_contribution_tokens = 0.0;
  double mean_context_tokens = 0.0;
};

// Validates one corpus row.  "where" seeds error messages.
PaperRecord parse_paper_record(const json& obj, const std::string& where);

// Streaming reader over corpus JSONL.  Lines that fail to parse or
// validate are recorded as issues and skipped; valid records after a
// bad line are still yielded.
class CorpusReader {
 public:
  explicit CorpusReader(std::istream& in) : in_(in) {}

  std::optional<PaperRecord> next();
  const std::vector<LineIssue>& issues() const { return issues_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::vector<LineIssue> issues_;
};

struct CorpusLoadResult {
  std::vector<PaperRecord> records;
  std::vector<LineIssue> issues;
};

CorpusLoadResult load_corpus(std::istream& in);

// A paper qualifies for curation when it has an abstract, a body, and
// at least min_citations links on each side.
bool is_eligible(const PaperRecord& record, std::size_t min_citations = 5);

// Keeps at most k links.  When the input already fits, it is returned
// unchanged; otherwise links are ranked by citation count (descending,
// ties broken by ascending id) and the top k are kept in that order.
std::vector<CitationLink> truncate_citations(std::vector<CitationLink> links,
                                             std::size_t k = 20);

// Joins the mention sentences of link, in index order, with single
// spaces.  mentioning_paper is the paper whose body the indices
// address.  Out-of-range indices raise a validation error naming it.
CitationContext extract_citation_context(const PaperRecord& mentioning_paper,
                                         const CitationLink& link);

struct CurateOptions {
  std::size_t min_citations = 5;
  std::size_t max_citations = 20;
  TokenizerConfig tokenizer;
  unsigned jobs = 1;
};

struct CurateWarnings {
  std::size_t dangling_links = 0;      // linked paper not in the corpus
  std::size_t invalid_mentions = 0;    // mention indices unusable or blank text
  std::size_t duplicate_paper_ids = 0; // later duplicates ignored
};

struct CurateResult {
  std::vector<CuratedExample> examples;  // sorted by paper_id
  CorpusStats stats;
  CurateWarnings warnings;
};

CurateResult curate(std::span<const PaperRecord> corpus,
                    const CurateOptions& options = {});

// Token-count means over a set of examples.  Folded in example order,
// with integer sums, so any reordering of the same examples gives
// byte-identical results.
CorpusStats compute_stats(std::span<const CuratedExample> examples,
                          const TokenizerConfig& tokenizer);

json curated_to_json(const CuratedExample& example);
CuratedExample curated_from_json(const json& obj, const std::string& where);
json stats_to_json(const CorpusStats& stats);

// Writes two training lines per example, one per summary side, each
// tagged with its control code.  Returns the number of lines written.
// Examples without references raise a validation error naming them.
std::size_t export_controlcode(std::span<const CuratedExample> examples,
                               std::ostream& out);

}  // namespace disum
