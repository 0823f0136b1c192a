#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "tabrml/rml.hpp"

using namespace tabrml;

namespace {

Sheet fixture(const std::string& name) {
  std::ifstream in(std::string(TABRML_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_canonical(ss.str());
}

MappingDocument predict(const Sheet& sheet, const PredictionOptions& options = {}) {
  Table table = extract_table(sheet);
  return emit_mapping(table, predict_table(table, options));
}

std::vector<std::string> objects_of(const std::vector<ProvenancedStatement>& st, std::string_view predicate_suffix,
                                    std::uint32_t row) {
  std::vector<std::string> out;
  for (const auto& s : st)
    if (s.row == row && s.triple.predicate.value.ends_with(predicate_suffix)) out.push_back(s.triple.object.value);
  return out;
}

}  // namespace

TEST(Slugify, Examples) {
  EXPECT_EQ(slugify("Partners"), "partners");
  EXPECT_EQ(slugify("Start Date (planned)"), "start_date_planned");
  EXPECT_EQ(slugify("  "), "");
}

TEST(EmitMapping, ProjectsFixtureTurtleContent) {
  MappingDocument doc = predict(fixture("projects.json"));
  std::string ttl = serialize_turtle(doc);
  EXPECT_NE(ttl.find("map:TriplesMap_projects a rr:TriplesMap"), std::string::npos);
  EXPECT_NE(ttl.find("rr:template \"http://example.org/entity/row_{row}\""), std::string::npos);
  EXPECT_NE(ttl.find("rml:reference \"A.valueInt\""), std::string::npos);
  EXPECT_NE(ttl.find("rr:datatype xsd:integer"), std::string::npos);
  EXPECT_NE(ttl.find("rr:datatype xsd:boolean"), std::string::npos);
  EXPECT_NE(ttl.find("fn:entityLinking"), std::string::npos);
  EXPECT_NE(ttl.find("rr:termType rr:IRI"), std::string::npos);
  EXPECT_NE(ttl.find("fn:getEntitiesByColor"), std::string::npos);
  EXPECT_NE(ttl.find("rr:constant \"#ff0000\""), std::string::npos);
  EXPECT_NE(ttl.find("fn:getEntitiesByTag"), std::string::npos);
  ASSERT_EQ(doc.gazetteers.size(), 1u);
  EXPECT_EQ(doc.gazetteers[0].first, "http://example.org/mapping#gazetteer_partners");
}

TEST(EmitMapping, BooleanDisplayOffFallsBackToIntegers) {
  PredictionOptions off;
  off.boolean_display = false;
  MappingDocument doc = predict(fixture("projects.json"), off);
  const auto& poms = doc.maps.at(0).poms;
  auto funded = std::find_if(poms.begin(), poms.end(), [](const auto& p) { return p.column == 1; });
  ASSERT_NE(funded, poms.end());
  EXPECT_NE(funded->object_map.datatype, xsd::kBoolean);
}

TEST(Turtle, ParseSerializeByteIdentity) {
  MappingDocument doc = predict(fixture("projects.json"));
  std::string ttl = serialize_turtle(doc);
  MappingDocument back = parse_mapping(ttl);
  back.gazetteers = doc.gazetteers;
  EXPECT_EQ(back, doc);
  EXPECT_EQ(serialize_turtle(back), ttl);
}

TEST(Turtle, EntitiesRoundTrip) {
  MappingDocument doc = predict(fixture("projects.json"));
  auto gaz = parse_entities(serialize_entities(doc));
  EXPECT_EQ(gaz, doc.gazetteers);
}

TEST(Turtle, CustomNamespacesSurvive) {
  Namespaces ns;
  ns.entity = "urn:x:ent/";
  ns.property = "https://p.example/vocab#";
  ns.function = "https://f.example/fn#";
  ns.mapping = "https://m.example/map/";
  Table table = extract_table(fixture("projects.json"));
  PredictionOptions options;
  options.entity_namespace = ns.entity;
  MappingDocument doc = emit_mapping(table, predict_table(table, options), ns);
  std::string ttl = serialize_turtle(doc);
  MappingDocument back = parse_mapping(ttl);
  back.gazetteers = doc.gazetteers;
  EXPECT_EQ(back, doc);
  EXPECT_EQ(serialize_turtle(back), ttl);
  EXPECT_EQ(parse_entities(serialize_entities(doc)), doc.gazetteers);
}

TEST(Turtle, MalformedMappingsAreParseErrors) {
  EXPECT_THROW(parse_mapping("@prefix rr: <http://www.w3.org/ns/r2rml#> .\n<a> rr:b "), ParseError);
  EXPECT_THROW(parse_mapping("<http://x/m> a <http://www.w3.org/ns/r2rml#TriplesMap> ."), ParseError);
}

TEST(Execute, ProjectsFixtureStatements) {
  Sheet sheet = fixture("projects.json");
  MappingDocument doc = predict(sheet);
  auto st = execute(doc, {sheet});
  EXPECT_EQ(st.size(), 31u);
  EXPECT_EQ(objects_of(st, "/id", 1), (std::vector<std::string>{"1"}));
  EXPECT_EQ(objects_of(st, "/funded", 2), (std::vector<std::string>{"false"}));
  EXPECT_EQ(objects_of(st, "/start", 2), (std::vector<std::string>{"2021-02-01"}));
  EXPECT_EQ(objects_of(st, "/partners", 3),
            (std::vector<std::string>{"http://example.org/entity/dfki", "http://example.org/entity/tukl"}));
  EXPECT_EQ(objects_of(st, "/milestones_color_ff0000", 1), (std::vector<std::string>{"2021-02-01"}));
  EXPECT_EQ(objects_of(st, "/milestones_i", 1), (std::vector<std::string>{"2021-03-15"}));
  EXPECT_EQ(objects_of(st, "/milestones_plain", 3), (std::vector<std::string>{"2021-07-01"}));
  for (const auto& s : st) {
    EXPECT_EQ(s.sheet, "Projects");
    EXPECT_EQ(s.triple.subject.value, "http://example.org/entity/row_" + std::to_string(s.row + 1));
  }
}

TEST(Execute, SerialDateTimeBecomesDateTime) {
  Sheet sheet("Log", 1, 3);
  sheet.set(0, 0, Text{"When"});
  sheet.set(0, 1, Numeric{44228.3479166667, "MM/DD/YYYY HH:MM AM/PM"});
  sheet.set(0, 2, Numeric{44229.5, "MM/DD/YYYY HH:MM AM/PM"});
  auto st = execute(predict(sheet), {sheet});
  ASSERT_EQ(st.size(), 2u);
  EXPECT_EQ(st[0].triple.object, Term::literal("2021-02-01T08:21:00", xsd::kDateTime));
  EXPECT_EQ(st[1].triple.object, Term::literal("2021-02-02T12:00:00", xsd::kDateTime));
}

TEST(Execute, MixedColumnChainsFallBack) {
  Sheet sheet("Mixed", 1, 11);
  sheet.set(0, 0, Text{"Count"});
  for (std::uint32_t r = 1; r <= 8; ++r) sheet.set(0, r, Numeric{static_cast<double>(r * 3), {}});
  sheet.set(0, 9, Text{"N/A"});
  sheet.set(0, 10, Text{"N/A"});
  MappingDocument doc = predict(sheet);
  EXPECT_EQ(doc.maps.at(0).poms.size(), 2u);
  auto st = execute(doc, {sheet});
  ASSERT_EQ(st.size(), 10u);
  EXPECT_EQ(st[0].triple.object, Term::literal("3", xsd::kInteger));
  EXPECT_EQ(st[9].triple.object.datatype, xsd::kBoolean);
}

TEST(Execute, Errors) {
  Sheet sheet = fixture("projects.json");
  MappingDocument doc = predict(sheet);
  Sheet renamed("Other", sheet.width(), sheet.height());
  EXPECT_THROW(execute(doc, {renamed}), ExecutionError);
  Sheet narrow("Projects", 2, 3);
  EXPECT_THROW(execute(doc, {narrow}), ExecutionError);
  MappingDocument no_gaz = doc;
  no_gaz.gazetteers.clear();
  EXPECT_THROW(execute(no_gaz, {sheet}), ExecutionError);
  EXPECT_TRUE(execute(MappingDocument{}, {sheet}).empty());
}

TEST(NQuads, ProvenanceRoundTrip) {
  Sheet sheet = fixture("projects.json");
  auto st = execute(predict(sheet), {sheet});
  std::string nq = serialize_nquads(st);
  EXPECT_NE(nq.find("<urn:cell:Projects:A2>"), std::string::npos);
  auto back = parse_provenanced_nquads(nq);
  EXPECT_EQ(back, st);
  EXPECT_EQ(serialize_nquads(back), nq);
}

TEST(NQuads, RandomRoundTripAndOddSheetNames) {
  std::mt19937 rng(17);
  for (int i = 0; i < 50; ++i) {
    auto st = oracle::random_sheet(rng, 20, 8);
    for (auto& s : st) s.sheet = "Sheet: \"odd\" %name ü";
    auto back = parse_provenanced_nquads(serialize_nquads(st));
    ASSERT_EQ(back, st);
  }
  EXPECT_THROW(parse_provenanced_nquads("<a:s> <a:p> <a:o> .\n"), ParseError);
  EXPECT_THROW(parse_provenanced_nquads("<a:s> <a:p> <a:o> <urn:cell:S:A0> .\n"), ParseError);
  EXPECT_THROW(parse_provenanced_nquads("<a:s> <a:p> <a:o> <urn:other> .\n"), ParseError);
}
