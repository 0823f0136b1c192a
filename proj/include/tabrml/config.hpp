#pragma once

// Run configuration: JSON file plus command-line overrides.

#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabrml/date_grammar.hpp"
#include "tabrml/error.hpp"
#include "tabrml/rml.hpp"
#include "tabrml/templates.hpp"
#include "tabrml/xlsx.hpp"

namespace tabrml {

struct RunConfig {
  Namespaces namespaces;
  double bool_length_threshold = 3.5;
  std::vector<std::string> true_lexicon = default_true_lexicon();
  std::vector<std::string> false_lexicon = default_false_lexicon();
  // "1/2/2021" reads as January 2 when set, February 1 otherwise.
  bool slash_month_first = true;
  // Tried after the built-in date patterns.
  std::vector<std::string> date_patterns;
  double matching_threshold = 0.0;
  bool boolean_display = true;
  std::filesystem::path out_dir = ".";
  bool dump_canonical = false;
  std::filesystem::path gazetteer;  // empty: look next to the mapping

  // Throws Error when a threshold or namespace is unusable.
  void validate() const;

  std::shared_ptr<const DateGrammar> grammar() const {
    auto patterns = DateGrammar::default_patterns(slash_month_first);
    patterns.insert(patterns.end(), date_patterns.begin(), date_patterns.end());
    return std::make_shared<const DateGrammar>(patterns);
  }

  PredictionOptions prediction_options(const DateGrammar& grammar) const {
    PredictionOptions o;
    o.bool_length_threshold = bool_length_threshold;
    o.boolean_display = boolean_display;
    o.true_lexicon = true_lexicon;
    o.false_lexicon = false_lexicon;
    o.entity_namespace = namespaces.entity;
    o.grammar = &grammar;
    return o;
  }
};

// Absolute IRI ending in '/' or '#', with a scheme and no characters that
// would need escaping inside <...>.
inline bool is_namespace_iri(std::string_view iri) {
  if (iri.empty() || (iri.back() != '/' && iri.back() != '#')) return false;
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = iri[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  for (char c : iri)
    if (static_cast<unsigned char>(c) <= 0x20 || std::string_view("<>\"{}|^`\\").find(c) != std::string_view::npos)
      return false;
  return true;
}

inline void RunConfig::validate() const {
  if (!(bool_length_threshold >= 0) || std::isinf(bool_length_threshold))
    throw Error("bool_length_threshold must be a finite non-negative number");
  if (!(matching_threshold >= 0)) throw Error("matching_threshold must be non-negative");
  for (const auto& [key, value] : {std::pair<std::string_view, const std::string*>{"entity", &namespaces.entity},
                                   {"property", &namespaces.property},
                                   {"function", &namespaces.function},
                                   {"mapping", &namespaces.mapping}})
    if (!is_namespace_iri(*value))
      throw Error("namespace '" + std::string(key) + "' is not a valid IRI prefix: '" + *value + "'");
  if (true_lexicon.empty() || false_lexicon.empty()) throw Error("boolean lexicons must not be empty");
  DateGrammar check(date_patterns);  // throws on a malformed pattern
}

// "inf" / "infinity" (any case) or a number.
inline double parse_threshold(std::string_view text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(std::string(text), &used);
  } catch (const std::exception&) {
    throw Error("not a number: '" + std::string(text) + "'");
  }
  if (used != text.size()) throw Error("not a number: '" + std::string(text) + "'");
  return v;
}

// Keys: namespaces{entity,property,function,mapping}, bool_length_threshold,
// true_lexicon, false_lexicon, slash_month_first, matching_threshold
// (number or "inf"), boolean_display, out_dir, dump_canonical, gazetteer,
// date_patterns.
inline RunConfig parse_config(std::string_view text, const RunConfig& base = {}) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config: expected a JSON object");
  RunConfig cfg = base;
  auto bad = [](const std::string& key, const std::string& what) { return ParseError("config key '" + key + "': " + what); };
  auto string_list = [&](const std::string& key, const json& v) {
    if (!v.is_array()) throw bad(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const json& x : v) {
      if (!x.is_string()) throw bad(key, "expected an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  };
  for (const auto& [key, v] : root.items()) {
    if (key == "namespaces") {
      if (!v.is_object()) throw bad(key, "expected an object");
      for (const auto& [name, iri] : v.items()) {
        if (!iri.is_string()) throw bad("namespaces." + name, "expected a string");
        std::string s = iri.get<std::string>();
        if (name == "entity") cfg.namespaces.entity = s;
        else if (name == "property") cfg.namespaces.property = s;
        else if (name == "function") cfg.namespaces.function = s;
        else if (name == "mapping") cfg.namespaces.mapping = s;
        else throw bad("namespaces." + name, "unknown namespace");
      }
    } else if (key == "bool_length_threshold") {
      if (!v.is_number()) throw bad(key, "expected a number");
      cfg.bool_length_threshold = v.get<double>();
    } else if (key == "matching_threshold") {
      if (v.is_number()) cfg.matching_threshold = v.get<double>();
      else if (v.is_string()) cfg.matching_threshold = parse_threshold(v.get<std::string>());
      else throw bad(key, "expected a number or \"inf\"");
    } else if (key == "true_lexicon") {
      cfg.true_lexicon = string_list(key, v);
    } else if (key == "false_lexicon") {
      cfg.false_lexicon = string_list(key, v);
    } else if (key == "date_patterns") {
      cfg.date_patterns = string_list(key, v);
    } else if (key == "slash_month_first" || key == "boolean_display" || key == "dump_canonical") {
      if (!v.is_boolean()) throw bad(key, "expected true or false");
      (key == "slash_month_first" ? cfg.slash_month_first
                                  : key == "boolean_display" ? cfg.boolean_display : cfg.dump_canonical) = v.get<bool>();
    } else if (key == "out_dir" || key == "gazetteer") {
      if (!v.is_string()) throw bad(key, "expected a path string");
      (key == "out_dir" ? cfg.out_dir : cfg.gazetteer) = v.get<std::string>();
    } else {
      throw bad(key, "unknown key");
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {}) {
  try {
    return parse_config(read_file_bytes(path), base);
  } catch (const IngestError&) {
    throw Error("cannot read config '" + path.string() + "'");
  }
}

}  // namespace tabrml
