// Command-line entry point: predict | execute | evaluate | pipeline.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tabrml/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out_dir;
  bool dump_canonical = false;
  std::string matching_threshold;
  std::optional<double> bool_length_threshold;
  std::string ns_entity, ns_property, ns_function, ns_mapping;
  std::string gazetteer;
  bool no_boolean_display = false;
  bool day_first = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "directory for generated files");
  cmd->add_option("--matching-threshold", o.matching_threshold, "pruning threshold for graph matching (number or inf)");
  cmd->add_option("--bool-length-threshold", o.bool_length_threshold, "max mean length of boolean strings");
  cmd->add_option("--namespace-entity", o.ns_entity, "IRI prefix of entities and subjects");
  cmd->add_option("--namespace-property", o.ns_property, "IRI prefix of predicates");
  cmd->add_option("--namespace-function", o.ns_function, "IRI prefix of functions");
  cmd->add_option("--namespace-mapping", o.ns_mapping, "IRI prefix of mapping resources");
  cmd->add_flag("--dump-canonical", o.dump_canonical, "also write each sheet in canonical form");
  cmd->add_option("--gazetteer", o.gazetteer, "entity label file for entityLinking")->check(CLI::ExistingFile);
  cmd->add_flag("--no-boolean-display", o.no_boolean_display, "do not treat text number formats as booleans");
  cmd->add_flag("--day-first", o.day_first, "read slash dates as day/month/year");
}

tabrml::RunConfig resolve(const Overrides& o) {
  tabrml::RunConfig cfg;
  if (!o.config.empty()) cfg = tabrml::load_config(o.config);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.dump_canonical) cfg.dump_canonical = true;
  if (!o.matching_threshold.empty()) cfg.matching_threshold = tabrml::parse_threshold(o.matching_threshold);
  if (o.bool_length_threshold) cfg.bool_length_threshold = *o.bool_length_threshold;
  if (!o.ns_entity.empty()) cfg.namespaces.entity = o.ns_entity;
  if (!o.ns_property.empty()) cfg.namespaces.property = o.ns_property;
  if (!o.ns_function.empty()) cfg.namespaces.function = o.ns_function;
  if (!o.ns_mapping.empty()) cfg.namespaces.mapping = o.ns_mapping;
  if (!o.gazetteer.empty()) cfg.gazetteer = o.gazetteer;
  if (o.no_boolean_display) cfg.boolean_display = false;
  if (o.day_first) cfg.slash_month_first = false;
  cfg.validate();
  return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predicts RML mappings for spreadsheet tables, runs them, and scores the output."};
  app.require_subcommand(1);
  Overrides o;

  std::string input, mapping, actual, expected;

  auto* predict = app.add_subcommand("predict", "predict one mapping per sheet");
  predict->add_option("input", input, "XLSX workbook or canonical sheet")->required();
  add_common(predict, o);

  auto* execute = app.add_subcommand("execute", "run a mapping and write provenance N-Quads");
  execute->add_option("input", input, "XLSX workbook or canonical sheet")->required();
  execute->add_option("mapping", mapping, "RML Turtle mapping")->required()->check(CLI::ExistingFile);
  add_common(execute, o);

  auto* evaluate = app.add_subcommand("evaluate", "compare two provenance N-Quads files");
  evaluate->add_option("actual", actual, "produced statements")->required()->check(CLI::ExistingFile);
  evaluate->add_option("expected", expected, "ground truth statements")->required()->check(CLI::ExistingFile);
  add_common(evaluate, o);

  auto* pipeline = app.add_subcommand("pipeline", "predict, execute and optionally evaluate");
  pipeline->add_option("input", input, "XLSX workbook, canonical sheet or directory")->required();
  pipeline->add_option("--expected", expected, "ground truth N-Quads (a directory for directory input)");
  add_common(pipeline, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    tabrml::RunConfig cfg = resolve(o);
    if (predict->parsed()) {
      auto r = tabrml::cmd_predict(input, cfg);
      print_warnings(r.warnings);
      std::cout << r.report;
      for (const auto& s : r.sheets) {
        std::cout << "wrote " << s.mapping.string() << "\n";
        std::cout << "wrote " << s.entities.string() << "\n";
        if (!s.canonical.empty()) std::cout << "wrote " << s.canonical.string() << "\n";
      }
    } else if (execute->parsed()) {
      auto r = tabrml::cmd_execute(input, mapping, cfg);
      std::cout << r.statements.size() << " statements\nwrote " << r.output.string() << "\n";
    } else if (evaluate->parsed()) {
      auto r = tabrml::cmd_evaluate(actual, expected, cfg);
      std::cout << r.text << "wrote " << r.json.string() << "\n";
    } else if (pipeline->parsed()) {
      std::optional<std::filesystem::path> truth;
      if (!expected.empty()) truth = expected;
      auto r = tabrml::cmd_pipeline(input, truth, cfg);
      print_warnings(r.warnings);
      std::cout << r.report;
    }
  } catch (const tabrml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
