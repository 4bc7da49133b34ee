#include "disum/sentences.hpp"

#include <cctype>
#include <unordered_set>

namespace disum {

namespace {

const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "e.g.", "i.e.",  "etc.",  "cf.",   "vs.",    "al.",   "fig.",  "figs.",
      "eq.",  "eqs.",  "sec.",  "secs.", "no.",    "nos.",  "dr.",   "prof.",
      "mr.",  "mrs.",  "ms.",   "st.",   "jr.",    "sr.",   "vol.",  "vols.",
      "pp.",  "ca.",   "approx.", "dept.", "univ.", "inc.",  "ltd.",  "co.",
      "resp.", "ref.", "refs.", "tab.",  "chap.",  "ed.",   "eds.",  "est.",
      "min.", "max.",  "avg.",  "i.i.d.", "w.r.t.", "a.k.a.", "ph.d.", "m.d.",
      "u.s.", "u.k.",  "e.u.",  "b.sc.", "m.sc.",
  };
  return set;
}

// The word ending at position i (inclusive), stripped of leading
// opening punctuation and lowercased.
std::string word_ending_at(const std::string& s, std::size_t i) {
  std::size_t start = i;
  while (start > 0 && s[start - 1] != ' ') --start;
  while (start <= i && (s[start] == '(' || s[start] == '[' || s[start] == '"' ||
                        s[start] == '\'')) {
    ++start;
  }
  std::string word = s.substr(start, i - start + 1);
  for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return word;
}

// "J." or "J.K." style dotted initials.
bool looks_like_initials(const std::string& word) {
  if (word.size() < 2 || word.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < word.size(); i += 2) {
    if (!std::isalpha(static_cast<unsigned char>(word[i]))) return false;
    if (word[i + 1] != '.') return false;
  }
  return true;
}

std::size_t word_start_at(const std::string& s, std::size_t i) {
  std::size_t start = i;
  while (start > 0 && s[start - 1] != ' ') --start;
  return start;
}

bool sentence_opener(unsigned char c) {
  return std::isupper(c) || std::isdigit(c) || c == '"' || c == '\'' || c == '(' ||
         c == '[';
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  const std::string s = normalize_whitespace(text);
  std::vector<std::string> sentences;
  if (s.empty()) return sentences;

  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(' || c == '[') {
      ++depth;
      continue;
    }
    if (c == ')' || c == ']') {
      if (depth > 0) --depth;
      continue;
    }
    if ((c != '.' && c != '!' && c != '?') || depth > 0) continue;

    // absorb closing quotes so the boundary lands after them
    std::size_t end = i;
    while (end + 1 < s.size() && (s[end + 1] == '"' || s[end + 1] == '\'')) ++end;
    if (end + 1 >= s.size()) break;  // the tail is emitted below
    if (s[end + 1] != ' ') continue;

    if (c == '.') {
      std::string word = word_ending_at(s, i);
      if (abbreviations().count(word)) continue;
      if (looks_like_initials(word)) {
        if (word.size() > 2) continue;
        // A lone letter with a period is an initial only at the start of a
        // sentence or after another initial; elsewhere it ends the sentence
        // ("... method X. We ...").
        std::size_t word_start = word_start_at(s, i);
        if (word_start <= start) continue;
        if (word_start >= 2 && s[word_start - 1] == ' ' &&
            looks_like_initials(word_ending_at(s, word_start - 2))) {
          continue;
        }
      }
    }
    if (end + 2 >= s.size()) break;
    if (!sentence_opener(static_cast<unsigned char>(s[end + 2]))) continue;

    sentences.push_back(s.substr(start, end - start + 1));
    start = end + 2;
    i = end + 1;
  }
  if (start < s.size()) sentences.push_back(s.substr(start));
  return sentences;
}

}  // namespace disum
