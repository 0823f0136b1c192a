#pragma once

// The predict / execute / evaluate / pipeline commands, as library calls that
// read and write files. The CLI is a thin wrapper around these.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabrml/cell_model.hpp"
#include "tabrml/config.hpp"
#include "tabrml/matching.hpp"
#include "tabrml/rml.hpp"
#include "tabrml/templates.hpp"
#include "tabrml/xlsx.hpp"

namespace tabrml {

namespace fs = std::filesystem;

struct InputSheets {
  std::vector<Sheet> sheets;
  std::vector<std::string> warnings;
};

inline bool looks_like_workbook(std::string_view bytes) {
  return bytes.substr(0, 2) == "PK" || bytes.substr(0, 4) == "\xD0\xCF\x11\xE0";
}

// XLSX workbook or a canonical sheet document, decided by content.
inline InputSheets load_input(const fs::path& path) {
  std::string bytes = read_file_bytes(path);
  InputSheets in;
  if (looks_like_workbook(bytes)) {
    Workbook wb = read_xlsx_file(path);
    in.sheets = std::move(wb.sheets);
    in.warnings = std::move(wb.warnings);
  } else {
    try {
      in.sheets.push_back(parse_canonical(bytes));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return in;
}

inline void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

struct SheetArtifacts {
  std::string sheet;
  fs::path mapping;
  fs::path entities;
  fs::path canonical;  // empty unless dumped
};

struct PredictResult {
  std::vector<SheetArtifacts> sheets;
  std::string report;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string artifact_base(const std::string& sheet, std::set<std::string>& used) {
  std::string base = slugify(sheet);
  if (base.empty()) base = "sheet";
  std::string name = base;
  for (int i = 2; !used.insert(name).second; ++i) name = base + "_" + std::to_string(i);
  return name;
}

inline PredictResult predict_sheets(const InputSheets& input, const RunConfig& cfg) {
  auto grammar = cfg.grammar();
  PredictionOptions options = cfg.prediction_options(*grammar);
  PredictResult result;
  result.warnings = input.warnings;
  std::set<std::string> used;
  for (const Sheet& sheet : input.sheets) {
    if (sheet.empty()) {
      result.warnings.push_back("sheet '" + sheet.name() + "' is blank; skipped");
      continue;
    }
    Table table = extract_table(sheet);
    auto predictions = predict_table(table, options);
    MappingDocument doc = emit_mapping(table, predictions, cfg.namespaces);

    SheetArtifacts art;
    art.sheet = sheet.name();
    std::string base = artifact_base(sheet.name(), used);
    art.mapping = cfg.out_dir / (base + ".rml.ttl");
    art.entities = cfg.out_dir / (base + ".entities.ttl");
    write_file(art.mapping, serialize_turtle(doc));
    write_file(art.entities, serialize_entities(doc));
    if (cfg.dump_canonical) {
      art.canonical = cfg.out_dir / (base + ".canonical.json");
      write_file(art.canonical, serialize_canonical(sheet));
    }
    result.report += "sheet '" + sheet.name() + "'\n" + prediction_report(predictions);
    result.sheets.push_back(std::move(art));
  }
  if (result.sheets.empty()) throw TableError("no table: every sheet of the input is blank");
  return result;
}

inline fs::path sibling_entities(const fs::path& mapping) {
  std::string name = mapping.filename().string();
  const std::string suffix = ".rml.ttl";
  if (name.size() > suffix.size() && name.ends_with(suffix))
    return mapping.parent_path() / (name.substr(0, name.size() - suffix.size()) + ".entities.ttl");
  return {};
}

inline std::string artifact_stem(const fs::path& mapping) {
  std::string name = mapping.filename().string();
  for (std::string_view suffix : {".rml.ttl", ".ttl"})
    if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
  return mapping.stem().string();
}

}  // namespace detail

inline PredictResult cmd_predict(const fs::path& input, const RunConfig& cfg) {
  cfg.validate();
  return detail::predict_sheets(load_input(input), cfg);
}

struct ExecuteResult {
  std::vector<ProvenancedStatement> statements;
  fs::path output;
};

inline ExecuteResult execute_mapping(const std::vector<Sheet>& sheets, const fs::path& mapping_path,
                                     const RunConfig& cfg) {
  MappingDocument doc;
  try {
    doc = parse_mapping(read_file_bytes(mapping_path));
  } catch (const ParseError& e) {
    throw ParseError(mapping_path.string() + ": " + e.what());
  }
  fs::path entities = cfg.gazetteer.empty() ? detail::sibling_entities(mapping_path) : cfg.gazetteer;
  if (!entities.empty() && (!cfg.gazetteer.empty() || fs::exists(entities))) {
    try {
      doc.gazetteers = parse_entities(read_file_bytes(entities));
    } catch (const ParseError& e) {
      throw ParseError(entities.string() + ": " + e.what());
    }
  }
  auto grammar = cfg.grammar();
  ExecuteResult result;
  result.statements = execute(doc, sheets, *grammar);
  result.output = cfg.out_dir / (detail::artifact_stem(mapping_path) + ".nq");
  write_file(result.output, serialize_nquads(result.statements));
  return result;
}

inline ExecuteResult cmd_execute(const fs::path& input, const fs::path& mapping, const RunConfig& cfg) {
  cfg.validate();
  return execute_mapping(load_input(input).sheets, mapping, cfg);
}

inline std::vector<ProvenancedStatement> load_statements(const fs::path& path) {
  try {
    return parse_provenanced_nquads(read_file_bytes(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct EvaluateResult {
  EvaluationReport report;
  std::string text;
  fs::path json;
};

inline EvaluateResult evaluate_statements(const std::vector<ProvenancedStatement>& actual,
                                          const std::vector<ProvenancedStatement>& expected, const RunConfig& cfg) {
  EvaluateResult r;
  r.report = evaluate(actual, expected, cfg.matching_threshold);
  r.text = report_text(r.report);
  r.json = cfg.out_dir / "metrics.json";
  write_file(r.json, report_json(r.report));
  write_file(cfg.out_dir / "metrics.txt", r.text);
  return r;
}

inline EvaluateResult cmd_evaluate(const fs::path& actual, const fs::path& expected, const RunConfig& cfg) {
  cfg.validate();
  return evaluate_statements(load_statements(actual), load_statements(expected), cfg);
}

struct PipelineResult {
  std::string report;
  std::vector<std::string> warnings;
  std::optional<MetricsReport> metrics;  // only when ground truth was given
};

namespace detail {

inline PipelineResult pipeline_file(const fs::path& input, const std::optional<fs::path>& expected,
                                    const RunConfig& cfg) {
  PipelineResult out;
  InputSheets sheets = load_input(input);
  PredictResult predicted = predict_sheets(sheets, cfg);
  out.warnings = predicted.warnings;
  out.report = predicted.report;

  std::vector<ProvenancedStatement> statements;
  for (const SheetArtifacts& art : predicted.sheets) {
    ExecuteResult ex = execute_mapping(sheets.sheets, art.mapping, cfg);
    statements.insert(statements.end(), ex.statements.begin(), ex.statements.end());
  }
  write_file(cfg.out_dir / "statements.nq", serialize_nquads(statements));
  out.report += "statements: " + std::to_string(statements.size()) + "\n";

  if (expected) {
    EvaluateResult ev = evaluate_statements(statements, load_statements(*expected), cfg);
    out.report += ev.text;
    out.metrics = ev.report.total;
  }
  return out;
}

}  // namespace detail

// A directory input runs every *.xlsx and *.json file in it (sorted by name)
// into out_dir/<stem>/. Ground truth for a directory is a directory holding
// <stem>.nq files; files without one are not evaluated.
inline PipelineResult cmd_pipeline(const fs::path& input, const std::optional<fs::path>& expected,
                                   const RunConfig& cfg) {
  cfg.validate();
  if (!fs::is_directory(input)) {
    if (expected && fs::is_directory(*expected)) throw Error("ground truth for a single input must be a file");
    return detail::pipeline_file(input, expected, cfg);
  }
  if (expected && !fs::is_directory(*expected)) throw Error("ground truth for a directory input must be a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input)) {
    auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".xlsx" || ext == ".json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  // Files run concurrently; results are gathered in name order.
  std::vector<std::future<PipelineResult>> jobs;
  for (const fs::path& file : files) {
    RunConfig sub = cfg;
    sub.out_dir = cfg.out_dir / file.stem();
    std::optional<fs::path> truth;
    if (expected && fs::exists(*expected / (file.stem().string() + ".nq"))) truth = *expected / (file.stem().string() + ".nq");
    jobs.push_back(std::async(std::launch::async, [file, truth, sub] { return detail::pipeline_file(file, truth, sub); }));
  }

  PipelineResult total;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  MetricsReport aggregate;
  bool evaluated = false;
  std::vector<std::string> errors;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::string name = files[i].filename().string();
    try {
      PipelineResult r = jobs[i].get();
      total.report += "== " + name + "\n" + r.report;
      for (auto& w : r.warnings) total.warnings.push_back(name + ": " + w);
      if (r.metrics) {
        aggregate += *r.metrics;
        summary[name] = to_json(*r.metrics);
        evaluated = true;
      }
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) throw Error(errors.front());
  if (evaluated) {
    aggregate.finalize();
    summary["total"] = to_json(aggregate);
    write_file(cfg.out_dir / "metrics.json", summary.dump(2) + "\n");
    total.report += "== total\n" + to_json(aggregate).dump() + "\n";
    total.metrics = aggregate;
  }
  return total;
}

}  // namespace tabrml
