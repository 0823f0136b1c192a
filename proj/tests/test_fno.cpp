#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "tabrml/fno.hpp"

using namespace tabrml;

namespace {

LiteralValue lit(const FnValue& v) {
  if (const auto* l = std::get_if<LiteralValue>(&v)) return *l;
  throw std::runtime_error("not a literal");
}

std::vector<std::string> iris(const std::vector<FnValue>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(std::get<ResourceValue>(v).iri);
  return out;
}

}  // namespace

TEST(ParseNumber, TextAndNumericInputs) {
  EXPECT_EQ(lit(parse_number(Text{"approx. 1,234.50 EUR"})), (LiteralValue{"1234.50", xsd::kDecimal}));
  EXPECT_EQ(lit(parse_number(Text{"1.234,5"}, ','))
                .lexical,
            "1234.5");
  EXPECT_EQ(lit(parse_number(Text{"-007"}, '.', true)), (LiteralValue{"-7", xsd::kInteger}));
  EXPECT_EQ(lit(parse_number(Numeric{0.1, {}})).lexical, "0.1");
  EXPECT_EQ(lit(parse_number(Numeric{42, {}}, '.', true)).lexical, "42");
  EXPECT_TRUE(is_nothing(parse_number(Numeric{4.5, {}}, '.', true)));
  EXPECT_TRUE(is_nothing(parse_number(Text{"3.5"}, '.', true)));
  EXPECT_TRUE(is_nothing(parse_number(Text{"none"})));
  EXPECT_EQ(lit(parse_number(Text{"-0"}, '.', true)).lexical, "0");
  EXPECT_EQ(lit(parse_number(Text{"ab-3"}, '.', true)).lexical, "3");
}

TEST(ParseNumber, AllMatchesReadsLists) {
  auto values = parse_numbers(Text{"42, 15; 3"}, '.', true);
  ASSERT_EQ(values.size(), 3u);
  EXPECT_EQ(lit(values[0]).lexical, "42");
  EXPECT_EQ(lit(values[2]).lexical, "3");
}

TEST(ParseBoolean, LexiconsAndNativeValues) {
  const auto& t = default_true_lexicon();
  const auto& f = default_false_lexicon();
  EXPECT_EQ(lit(parse_boolean(Text{" YES "}, t, f)).lexical, "true");
  EXPECT_EQ(lit(parse_boolean(Text{"nein"}, t, f)).lexical, "false");
  EXPECT_EQ(lit(parse_boolean(Boolean{false}, t, f)), (LiteralValue{"false", xsd::kBoolean}));
  EXPECT_EQ(lit(parse_boolean(Numeric{1, {}}, t, f)).lexical, "true");
  EXPECT_TRUE(is_nothing(parse_boolean(Numeric{2, {}}, t, f)));
  EXPECT_TRUE(is_nothing(parse_boolean(Text{"maybe"}, t, f)));
  EXPECT_EQ(lit(parse_boolean(Text{"N/A"}, {"n/a"}, {})).lexical, "true");
}

TEST(ParseDate, SerialsAndText) {
  EXPECT_EQ(lit(parse_date(Numeric{44228, {}})), (LiteralValue{"2021-02-01", xsd::kDate}));
  EXPECT_EQ(lit(parse_date(Numeric{1, {}})).lexical, "1900-01-01");
  EXPECT_EQ(lit(parse_date(Numeric{59, {}})).lexical, "1900-02-28");
  EXPECT_EQ(lit(parse_date(Numeric{61, {}})).lexical, "1900-03-01");
  EXPECT_TRUE(is_nothing(parse_date(Numeric{60, {}})));
  EXPECT_TRUE(is_nothing(parse_date(Numeric{0.5, {}})));
  EXPECT_TRUE(is_nothing(parse_date(Numeric{2958466, {}})));
  EXPECT_EQ(lit(parse_date(Numeric{2958465, {}})).lexical, "9999-12-31");
  EXPECT_EQ(lit(parse_date(Text{"start: 15.03.2021"})).lexical, "2021-03-15");
  EXPECT_TRUE(is_nothing(parse_date(Text{"soon"})));
}

TEST(ParseDateTime, SerialTimeOfDay) {
  EXPECT_EQ(lit(parse_datetime(Numeric{44228.3479166667, {}})),
            (LiteralValue{"2021-02-01T08:21:00", xsd::kDateTime}));
  EXPECT_EQ(lit(parse_datetime(Text{"02/01/2021 08:21 PM"})).lexical, "2021-02-01T20:21:00");
  EXPECT_TRUE(is_nothing(parse_datetime(Text{"01.02.2021"})));
}

TEST(ParseDate, SerialOracleAgainstChrono) {
  using namespace std::chrono;
  const sys_days epoch = sys_days{year{1899} / December / 30};
  for (int serial = 61; serial < 2958466; serial += 997) {
    year_month_day ymd{epoch + days{serial}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    ASSERT_EQ(lit(parse_date(Numeric{static_cast<double>(serial), {}})).lexical, buf) << serial;
  }
}

TEST(EntityLinking, Examples) {
  Gazetteer g{{{"DFKI", "urn:e:dfki"}, {"TU KL", "urn:e:tukl"}, {"TU", "urn:e:tu"}, {"dfki", "urn:e:other"}}};
  CompiledGazetteer cg(g);
  EXPECT_EQ(iris(entity_linking("dfki and tu kl, TU", cg)),
            (std::vector<std::string>{"urn:e:dfki", "urn:e:tukl", "urn:e:tu"}));
  EXPECT_TRUE(entity_linking("DFKIX TUe", cg).empty());
  EXPECT_TRUE(entity_linking("anything", CompiledGazetteer{}).empty());
}

TEST(EntityLinking, AgreesWithBruteForce) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> count(0, 12);
  std::uniform_int_distribution<std::size_t> pieces(0, 25);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> labels;
    int n = count(rng);
    for (int k = 0; k < n; ++k) {
      std::string label = oracle::random_label(rng);
      labels.push_back(label);
      entries.emplace_back(label, "urn:e:" + std::to_string(k));
    }
    std::string text = oracle::random_text(rng, labels, pieces(rng));
    CompiledGazetteer cg(Gazetteer{entries});
    ASSERT_EQ(iris(entity_linking(text, cg)), oracle::brute_force_link(text, entries)) << text;
  }
}

TEST(Extraction, SpansBySelector) {
  std::string html = "<font color=\"#ff0000\">01.02.2021</font>, <i>15.03.2021</i>; 01.07.2021 <b><i>x</i></b>";
  RunSelector red;
  red.mode = RunSelector::Mode::Color;
  red.color = "#ff0000";
  EXPECT_EQ(extract_spans(html, red), (std::vector<std::string>{"01.02.2021"}));
  RunSelector italic;
  italic.mode = RunSelector::Mode::Tag;
  italic.tag = "i";
  EXPECT_EQ(extract_spans(html, italic), (std::vector<std::string>{"15.03.2021", "x"}));
  RunSelector plain;
  EXPECT_EQ(extract_spans(html, plain), (std::vector<std::string>{"01.07.2021"}));
  RunSelector exact;
  exact.mode = RunSelector::Mode::Exact;
  exact.key = "i";
  EXPECT_EQ(extract_spans(html, exact), (std::vector<std::string>{"15.03.2021"}));
}

TEST(Apply, ExtractionWithInnerFunction) {
  FunctionCall call(FunctionId::GetEntitiesByColor);
  call.set(param::kColorHex, "#FF0000");
  auto inner = std::make_shared<FunctionCall>(FunctionId::ParseDate);
  call.inner = inner;
  FunctionContext ctx;
  auto out = apply(call, RichText{"<font color=\"#ff0000\">01.02.2021</font> and <font color=\"#ff0000\">junk</font>"}, ctx);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(lit(out[0]), (LiteralValue{"2021-02-01", xsd::kDate}));

  FunctionCall bad(FunctionId::GetEntitiesByTag);
  bad.set(param::kTag, "script");
  EXPECT_THROW(apply(bad, Text{"x"}, ctx), Error);
  FunctionCall link(FunctionId::EntityLinking);
  link.set(param::kGazetteer, "urn:missing");
  EXPECT_THROW(apply(link, Text{"x"}, ctx), ExecutionError);
  EXPECT_TRUE(apply(link, Blank{}, ctx).empty());
}

TEST(Accessors, ProjectByKind) {
  EXPECT_EQ(resolve_accessor(Accessor::ValueInt, Numeric{3, {}}), CellValue(Numeric{3, {}}));
  EXPECT_FALSE(resolve_accessor(Accessor::ValueInt, Numeric{3.5, {}}));
  EXPECT_FALSE(resolve_accessor(Accessor::ValueBoolean, Text{"true"}));
  EXPECT_FALSE(resolve_accessor(Accessor::ValueString, Numeric{1, {}}));
  EXPECT_EQ(resolve_accessor(Accessor::Value, Numeric{1.5, {}}), CellValue(Text{"1.5"}));
  EXPECT_EQ(resolve_accessor(Accessor::ValueRichText, Text{"a<b"}), CellValue(RichText{"a&lt;b"}));
  EXPECT_FALSE(resolve_accessor(Accessor::Json, Blank{}));
  for (Accessor a : kAllAccessors) EXPECT_EQ(accessor_from_name(accessor_name(a)), a);
  for (FunctionId f : kAllFunctions) EXPECT_EQ(function_from_name(function_name(f)), f);
}

TEST(ObjectMaps, DatatypeOverridesAndIriFilter) {
  FunctionContext ctx;
  ObjectMap ints{Accessor::ValueInt, TermType::Literal, xsd::kInteger, std::nullopt};
  auto out = evaluate_object_map(ints, Numeric{7, {}}, ctx);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(lit(out[0]), (LiteralValue{"7", xsd::kInteger}));
  EXPECT_TRUE(evaluate_object_map(ints, Text{"7"}, ctx).empty());

  ObjectMap iri_from_number{Accessor::Value, TermType::Iri, "", FunctionCall(FunctionId::ParseNumber)};
  EXPECT_TRUE(evaluate_object_map(iri_from_number, Text{"7"}, ctx).empty());
}
