#include "disum/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace disum {

namespace {

[[noreturn]] void unknown_key(const std::string& path) {
  throw Error::config("unknown config key '" + path + "'");
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw Error::config(std::string("config key '") + key + "' must be a boolean");
  }
  return it->get<bool>();
}

double get_number(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    throw Error::config(std::string("config key '") + key + "' must be a number");
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw Error::config(std::string("config key '") + key + "' must be finite");
  }
  return v;
}

std::size_t get_uint(const json& obj, const char* key, std::size_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw Error::config(std::string("config key '") + key +
                        "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(it->get<long long>());
}

NouveauWeights parse_weights(const json& obj) {
  NouveauWeights weights;  // explicit config replaces the defaults
  if (!obj.is_object()) {
    throw Error::config("config key 'nouveau_weights' must be an object");
  }
  if (obj.empty()) {
    throw Error::config("config key 'nouveau_weights' must not be empty");
  }
  for (const auto& [key, value] : obj.items()) {
    int order = 0;
    try {
      std::size_t pos = 0;
      order = std::stoi(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw Error::config("config key 'nouveau_weights." + key +
                          "' must name an n-gram order");
    }
    if (order < 1) {
      throw Error::config("config key 'nouveau_weights." + key +
                          "' must name an order >= 1");
    }
    if (!value.is_array() || value.size() != 3) {
      throw Error::config("config key 'nouveau_weights." + key +
                          "' must be an array of three numbers");
    }
    NouveauTerms terms;
    double* slots[3] = {&terms.a0, &terms.a1, &terms.a2};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!value[i].is_number() || !std::isfinite(value[i].get<double>())) {
        throw Error::config("config key 'nouveau_weights." + key +
                            "' must contain finite numbers");
      }
      *slots[i] = value[i].get<double>();
    }
    weights.set(order, terms);
  }
  return weights;
}

}  // namespace

RunConfig parse_run_config(const json& obj) {
  if (!obj.is_object()) {
    throw Error::config("configuration must be a JSON object");
  }
  static const char* kTopKeys[] = {
      "tokenizer",       "nouveau_weights", "citation_ranking",
      "min_citations",   "max_citations",   "label_threshold",
      "low_score_threshold", "lambda",      "jobs"};
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kTopKeys) known = known || key == k;
    if (!known) unknown_key(key);
  }

  RunConfig config;
  if (auto it = obj.find("tokenizer"); it != obj.end()) {
    if (!it->is_object()) {
      throw Error::config("config key 'tokenizer' must be an object");
    }
    for (const auto& [key, value] : it->items()) {
      (void)value;
      if (key != "lowercase" && key != "stem") unknown_key("tokenizer." + key);
    }
    config.tokenizer.lowercase = get_bool(*it, "lowercase", true);
    config.tokenizer.stem = get_bool(*it, "stem", false);
  }
  if (auto it = obj.find("nouveau_weights"); it != obj.end()) {
    config.nouveau = parse_weights(*it);
  }
  if (auto it = obj.find("citation_ranking"); it != obj.end()) {
    if (!it->is_string()) {
      throw Error::config("config key 'citation_ranking' must be a string");
    }
    config.citation_ranking = it->get<std::string>();
    if (config.citation_ranking != "cited_count") {
      throw Error::config("unsupported citation_ranking '" +
                          config.citation_ranking +
                          "' (supported: cited_count)");
    }
  }
  config.min_citations = get_uint(obj, "min_citations", config.min_citations);
  config.max_citations = get_uint(obj, "max_citations", config.max_citations);
  if (config.max_citations == 0) {
    throw Error::config("config key 'max_citations' must be at least 1");
  }
  if (config.max_citations < config.min_citations) {
    throw Error::config(
        "config key 'max_citations' must not be smaller than 'min_citations'");
  }
  config.label_threshold =
      get_number(obj, "label_threshold", config.label_threshold);
  if (config.label_threshold < 0.0 || config.label_threshold > 1.0) {
    throw Error::config("config key 'label_threshold' must lie in [0, 1]");
  }
  config.low_score_threshold =
      get_number(obj, "low_score_threshold", config.low_score_threshold);
  config.lambda = get_number(obj, "lambda", config.lambda);
  if (config.lambda < 0.0) {
    throw Error::config("config key 'lambda' must be non-negative");
  }
  config.jobs = static_cast<unsigned>(get_uint(obj, "jobs", config.jobs));
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json obj = json::parse(buffer.str(), nullptr, false);
  if (obj.is_discarded()) {
    throw Error::config("config file '" + path.string() + "' is not valid JSON");
  }
  try {
    return parse_run_config(obj);
  } catch (const Error& e) {
    throw Error(e.kind(), "config file '" + path.string() + "': " + e.what());
  }
}

}  // namespace disum
