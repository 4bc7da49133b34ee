#include "disum/jsonl.hpp"

#include <cmath>

namespace disum {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error::io("cannot open input file '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error::io("cannot open output file '" + path.string() + "'");
  return out;
}

void write_jsonl_line(std::ostream& out, const json& obj) {
  out << obj.dump() << '\n';
}

const json& require_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error::validation(where + ": missing required field '" + key + "'");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_string()) {
    throw Error::validation(where + ": field '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::string require_nonempty_string(const json& obj, const char* key,
                                    const std::string& where) {
  std::string s = require_string(obj, key, where);
  if (s.empty()) {
    throw Error::validation(where + ": field '" + key + "' must be non-empty");
  }
  return s;
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_number()) {
    throw Error::validation(where + ": field '" + key + "' must be a number");
  }
  double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw Error::validation(where + ": field '" + key + "' must be finite");
  }
  return d;
}

std::size_t require_uint(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
    throw Error::validation(where + ": field '" + key +
                            "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v.get<long long>());
}

const json& require_array(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_array()) {
    throw Error::validation(where + ": field '" + key + "' must be an array");
  }
  return v;
}

std::string optional_string(const json& obj, const char* key, const std::string& where,
                            std::string fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) {
    throw Error::validation(where + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> optional_string_array(const json& obj, const char* key,
                                               const std::string& where) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) {
    throw Error::validation(where + ": field '" + key + "' must be an array");
  }
  out.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (!v.is_string()) {
      throw Error::validation(where + ": field '" + key + "[" + std::to_string(i) +
                              "]' must be a string");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace disum
