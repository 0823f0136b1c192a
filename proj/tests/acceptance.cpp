// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check returns an empty string on success or a reason.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "tabrml/matching.hpp"
#include "tabrml/rml.hpp"

using namespace tabrml;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Sheet projects_sheet() { return parse_canonical(slurp(fs::path(TABRML_FIXTURES) / "projects.json")); }

std::vector<std::string> letters(std::string_view s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

std::string check_dup() {
  const std::vector<std::pair<std::string, double>> table = {
      {"aaaaaa", 1.00},   {"aaabbb", 0.92},  {"aaaabb", 0.92}, {"aabbcc", 0.83},   {"aaabbc", 0.75},
      {"aaabbbcd", 0.69}, {"aabbbcd", 0.64}, {"aabbcd", 0.58}, {"aaaabcde", 0.50}, {"aaabcd", 0.50},
      {"aabc", 0.50},     {"aaacdef", 0.43}, {"aacdef", 0.33}, {"abcdef", 0.08}};
  for (const auto& [set, expected] : table) {
    double got = dup_multiset(letters(set));
    if (std::abs(got - expected) > 0.005) return set + ": " + std::to_string(got) + " vs " + std::to_string(expected);
  }
  return "";
}

std::string check_sep() {
  auto got = sep("DFKI; TUKL (42)");
  if (got != std::vector<std::string>{"DFKI", "TUKL", "42"}) return "got " + std::to_string(got.size()) + " tokens";
  return "";
}

std::string check_dp() {
  int got = dp(0.023);
  return got == 3 ? "" : "dp(0.023) = " + std::to_string(got);
}

std::string check_serial_date() {
  Sheet sheet("Log", 1, 2);
  sheet.set(0, 0, Text{"When"});
  sheet.set(0, 1, Numeric{44228.3479166667, "MM/DD/YYYY HH:MM AM/PM"});
  Table table = extract_table(sheet);
  auto st = execute(emit_mapping(table, predict_table(table)), {sheet});
  if (st.size() != 1) return std::to_string(st.size()) + " statements";
  Term want = Term::literal("2021-02-01T08:21:00", xsd::kDateTime);
  if (st[0].triple.object != want) return "got " + to_ntriples(st[0].triple.object);
  return "";
}

const PredicateObjectMap* pom_for(const MappingDocument& doc, std::uint32_t column, std::string_view suffix = "") {
  for (const auto& p : doc.maps.at(0).poms)
    if (p.column == column && p.predicate.ends_with(suffix)) return &p;
  return nullptr;
}

bool wraps_date(const PredicateObjectMap* p) {
  return p && p->object_map.function && p->object_map.function->inner &&
         p->object_map.function->inner->function == FunctionId::ParseDate && p->object_map.datatype == xsd::kDate;
}

std::string check_projects() {
  Sheet sheet = projects_sheet();
  Table table = extract_table(sheet);
  auto predictions = predict_table(table);
  std::string ttl = serialize_turtle(emit_mapping(table, predictions));
  // Everything below reads the emitted Turtle back.
  MappingDocument doc = parse_mapping(ttl);

  const auto* a = pom_for(doc, 0);
  if (!a || a->object_map.datatype != xsd::kInteger) return "A: no xsd:integer map";
  const auto* b = pom_for(doc, 1);
  if (!b || b->object_map.datatype != xsd::kBoolean) return "B: no xsd:boolean map";
  if (predictions[2].tree.roots.at(0).chosen.id != TemplateId::DateAsString) return "C: not DateAsString";
  const auto* c = pom_for(doc, 2);
  if (!c || !c->object_map.function || c->object_map.function->function != FunctionId::ParseDate)
    return "C: no parseDate";
  const auto* d = pom_for(doc, 3);
  if (!d || !d->object_map.function || d->object_map.function->function != FunctionId::EntityLinking ||
      d->object_map.term_type != TermType::Iri)
    return "D: no entityLinking IRI map";
  if (!predictions[4].formatted) return "E: not FormattedText";
  const auto* red = pom_for(doc, 4, "_color_ff0000");
  if (!red || red->object_map.function->function != FunctionId::GetEntitiesByColor ||
      red->object_map.function->get(param::kColorHex) != "#ff0000" || !wraps_date(red))
    return "E: no getEntitiesByColor(#ff0000) over parseDate";
  const auto* italic = pom_for(doc, 4, "_i");
  if (!italic || italic->object_map.function->function != FunctionId::GetEntitiesByTag ||
      italic->object_map.function->get(param::kTag) != "i" || !wraps_date(italic))
    return "E: no getEntitiesByTag(i) over parseDate";
  for (std::string_view needle : {"rr:datatype xsd:integer", "rr:datatype xsd:boolean", "fn:parseDate",
                                  "fn:entityLinking", "rr:termType rr:IRI", "fn:getEntitiesByColor",
                                  "\"#ff0000\"", "fn:getEntitiesByTag"})
    if (ttl.find(needle) == std::string::npos) return "Turtle lacks " + std::string(needle);
  return "";
}

std::string check_substitution() {
  std::mt19937 rng(20240601);
  for (int i = 0; i < 100; ++i) {
    auto expected = oracle::random_sheet(rng, 20, 8);
    auto actual = oracle::rename_iris(expected, "s" + std::to_string(i));
    MetricsReport m = evaluate_sheet(actual, expected);
    if (m.precision != 1.0 || m.recall != 1.0 || m.fmeasure != 1.0)
      return "case " + std::to_string(i) + ": p=" + std::to_string(m.precision) + " r=" + std::to_string(m.recall);
  }
  return "";
}

std::string check_optimality() {
  std::mt19937 rng(777);
  for (int i = 0; i < 200; ++i) {
    auto a = oracle::random_graph(rng, 6, 2, 3, 3, 2);
    auto b = oracle::random_graph(rng, 6, 2, 3, 3, 2);
    const auto& longer = a.size() >= b.size() ? a : b;
    const auto& shorter = a.size() >= b.size() ? b : a;
    std::size_t greedy =
        matched_statements(longer, {shorter.begin(), shorter.end()}, greedy_match(longer, shorter, {}, kInf));
    std::size_t best = oracle::exhaustive_optimum(longer, shorter);
    if (greedy != best)
      return "case " + std::to_string(i) + ": greedy " + std::to_string(greedy) + " vs " + std::to_string(best);
  }
  return "";
}

std::string check_metrics() {
  std::mt19937 rng(4242);
  for (int i = 0; i < 300; ++i) {
    auto a = oracle::random_sheet(rng, 12, 6);
    auto e = oracle::random_sheet(rng, 12, 6);
    if (i % 3 == 1) a = oracle::rename_iris(e, "x");
    SheetEvaluation ev = evaluate_sheet_detailed(a, e);
    for (const CellCounts& c : ev.cells) {
      if (c.tp + c.fn != c.expected) return "tp+fn != |expected|";
      if (c.tp + c.fp != c.mapped_actual) return "tp+fp != |mapped actual|";
    }
    const MetricsReport& m = ev.metrics;
    double p = m.tp + m.fp ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
    double r = m.tp + m.fn ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
    double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    if (std::abs(m.precision - p) > 1e-12 || std::abs(m.recall - r) > 1e-12 || std::abs(m.fmeasure - f) > 1e-12)
      return "metric mismatch in case " + std::to_string(i);
  }
  MetricsReport empty = evaluate_sheet({}, {});
  if (empty.precision != 0.0 || empty.recall != 0.0 || empty.fmeasure != 0.0) return "empty inputs not all zero";
  std::vector<ProvenancedStatement> one = {
      {{Term::iri("urn:s"), Term::iri("urn:p"), Term::literal("v")}, "S", 0, 1}};
  MetricsReport no_actual = evaluate_sheet({}, one), no_expected = evaluate_sheet(one, {});
  if (no_actual.precision != 0.0 || no_actual.fmeasure != 0.0) return "empty actual: p or f not 0";
  if (no_expected.recall != 0.0 || no_expected.fmeasure != 0.0) return "empty expected: r or f not 0";
  return "";
}

std::string check_linking() {
  std::mt19937 rng(99991);
  std::uniform_int_distribution<int> count(0, 50);
  std::uniform_int_distribution<std::size_t> pieces(0, 40);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> labels;
    int n = count(rng);
    for (int k = 0; k < n; ++k) {
      labels.push_back(oracle::random_label(rng));
      entries.emplace_back(labels.back(), "urn:e:" + std::to_string(k));
    }
    std::string text = oracle::random_text(rng, labels, pieces(rng));
    std::vector<std::string> got;
    for (const FnValue& v : entity_linking(text, CompiledGazetteer(Gazetteer{entries})))
      got.push_back(std::get<ResourceValue>(v).iri);
    if (got != oracle::brute_force_link(text, entries)) return "case " + std::to_string(i) + ": '" + text + "'";
  }
  return "";
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + TABRML_CLI + "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string check_round_trips() {
  Sheet sheet = projects_sheet();
  std::string canonical = serialize_canonical(sheet);
  if (!(parse_canonical(canonical) == sheet) || serialize_canonical(parse_canonical(canonical)) != canonical)
    return "canonical round trip";
  Table table = extract_table(sheet);
  std::string ttl = serialize_turtle(emit_mapping(table, predict_table(table)));
  if (serialize_turtle(parse_mapping(ttl)) != ttl) return "Turtle re-serialization differs";

  fs::path dir = fs::temp_directory_path() / ("tabrml_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string input = "\"" + (fs::path(TABRML_FIXTURES) / "projects.json").string() + "\"";
  std::string reason;
  for (const char* run : {"a", "b"})
    if (run_cli("pipeline " + input + " --out-dir \"" + (dir / run).string() + "\"") != 0) reason = "pipeline failed";
  if (reason.empty()) {
    for (const char* rel : {"statements.nq", "projects.rml.ttl", "projects.entities.ttl"}) {
      std::string x = slurp(dir / "a" / rel);
      if (x.empty() || x != slurp(dir / "b" / rel)) reason = std::string(rel) + " differs between runs";
    }
  }
  fs::remove_all(dir);
  return reason;
}

std::string check_mixed_column() {
  std::vector<Cell> cells;
  for (std::uint32_t r = 1; r <= 8; ++r) cells.push_back({0, r, Numeric{static_cast<double>(r * 11), {}}});
  cells.push_back({0, 9, Text{"N/A"}});
  cells.push_back({0, 10, Text{"N/A"}});
  PredictionTree tree = predict_column(cells);
  if (tree.roots.size() != 1) return std::to_string(tree.roots.size()) + " roots";
  const PredictionNode& root = tree.roots[0];
  if (root.covered.size() != 8) return "root covers " + std::to_string(root.covered.size());
  for (const Cell& c : root.covered)
    if (!std::holds_alternative<Numeric>(c.value)) return "root covers a string";
  if (root.chosen.object_map.datatype != xsd::kInteger) return "root map not integer typed";
  if (root.children.size() != 1) return std::to_string(root.children.size()) + " children";
  const PredictionNode& child = root.children[0];
  if (child.covered.size() != 2) return "child covers " + std::to_string(child.covered.size());
  for (const Cell& c : child.covered)
    if (!std::holds_alternative<Text>(c.value)) return "child covers a number";
  if (!tree.residue.empty()) return "residue left";
  return "";
}

struct Criterion {
  int number;
  std::string name;
  double limit_seconds;  // <= 0: no timing bound
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "dup value table", 1.0, check_dup},
      {2, "sep worked example", 0, check_sep},
      {3, "dp worked example", 0, check_dp},
      {4, "serial date executes to xsd:dateTime", 0, check_serial_date},
      {5, "projects fixture end to end", 5.0, check_projects},
      {6, "matching substitution property", 60.0, check_substitution},
      {7, "matching optimality oracle", 120.0, check_optimality},
      {8, "metrics identities", 0, check_metrics},
      {9, "entityLinking oracle equivalence", 30.0, check_linking},
      {10, "deterministic round trips", 0, check_round_trips},
      {11, "mixed-column regression", 0, check_mixed_column},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = c.check();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reason.empty() && c.limit_seconds > 0 && seconds >= c.limit_seconds)
      reason = "took " + std::to_string(seconds) + " s, limit " + std::to_string(c.limit_seconds) + " s";
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f s", seconds);
    std::cout << (reason.empty() ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " (" << timing
              << ")";
    if (!reason.empty()) std::cout << " -- " << reason;
    std::cout << "\n";
    failures += !reason.empty();
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criterion(s) failed\n"
                         : std::string("acceptance: all criteria passed\n"));
  return failures ? 1 : 0;
}
