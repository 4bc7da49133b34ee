#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "disum/error.hpp"

namespace disum {

// Insertion-ordered JSON keeps output files stable and diffable.
using json = nlohmann::ordered_json;

// A non-fatal problem tied to one line of an input file.
struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

// Opens a file for reading, throwing an Io error naming the path.
std::ifstream open_input(const std::filesystem::path& path);

// Opens a file for writing (truncating), throwing an Io error naming the path.
std::ofstream open_output(const std::filesystem::path& path);

void write_jsonl_line(std::ostream& out, const json& obj);

// Calls fn(line_number, object) for every line that parses as a JSON
// object.  Blank lines are skipped silently; lines that are not valid
// JSON objects are recorded in issues and skipped.  fn may throw Error
// to record a schema issue for the current line and keep going.
template <typename Fn>
void for_each_jsonl(std::istream& in, std::vector<LineIssue>& issues, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      issues.push_back({line_no, "invalid JSON"});
      continue;
    }
    if (!obj.is_object()) {
      issues.push_back({line_no, "expected a JSON object"});
      continue;
    }
    try {
      fn(line_no, obj);
    } catch (const Error& e) {
      issues.push_back({line_no, e.what()});
    }
  }
}

// --- field access helpers -------------------------------------------------
//
// "where" names the record for error messages ("line 7", "paper 'x1'").
// All helpers throw Error::validation with the field name on violations.

const json& require_field(const json& obj, const char* key, const std::string& where);

std::string require_string(const json& obj, const char* key, const std::string& where);
std::string require_nonempty_string(const json& obj, const char* key,
                                    const std::string& where);
double require_number(const json& obj, const char* key, const std::string& where);
std::size_t require_uint(const json& obj, const char* key, const std::string& where);
const json& require_array(const json& obj, const char* key, const std::string& where);

// Missing key yields the fallback; a present key must have the right type.
std::string optional_string(const json& obj, const char* key, const std::string& where,
                            std::string fallback = {});
std::vector<std::string> optional_string_array(const json& obj, const char* key,
                                               const std::string& where);

}  // namespace disum
