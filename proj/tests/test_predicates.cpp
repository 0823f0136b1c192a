#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "tabrml/predicates.hpp"

using namespace tabrml;

namespace {

std::vector<std::string> letters(std::string_view s) {
  std::vector<std::string> out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

// Straight from the set definitions: U = elements seen once, P = distinct.
double dup_oracle(const std::vector<std::string>& c) {
  if (c.size() <= 1) return 0.0;
  std::map<std::string, int> freq;
  for (const auto& s : c) freq[s]++;
  std::size_t u = 0;
  for (const auto& s : c) u += freq[s] == 1;
  double n = static_cast<double>(c.size());
  return (2 * n - static_cast<double>(u) - static_cast<double>(freq.size()) + 1) / (2 * n);
}

std::vector<Cell> column(std::vector<CellValue> values) {
  std::vector<Cell> out;
  std::uint32_t row = 1;
  for (auto& v : values) out.push_back({0, row++, std::move(v)});
  return out;
}

}  // namespace

TEST(Dup, WorkedTable) {
  const std::vector<std::pair<std::string, double>> table = {
      {"aaaaaa", 1.00}, {"aaabbb", 0.92}, {"aaaabb", 0.92},   {"aabbcc", 0.83},  {"aaabbc", 0.75},
      {"aaabbbcd", 0.69}, {"aabbbcd", 0.64}, {"aabbcd", 0.58}, {"aaaabcde", 0.50}, {"aaabcd", 0.50},
      {"aabc", 0.50},   {"aaacdef", 0.43}, {"aacdef", 0.33},   {"abcdef", 0.08}};
  for (const auto& [set, expected] : table) EXPECT_NEAR(dup_multiset(letters(set)), expected, 0.005) << set;
}

TEST(Dup, DegenerateColumnsAreZero) {
  EXPECT_EQ(dup_multiset(std::vector<std::string>{}), 0.0);
  EXPECT_EQ(dup_multiset(letters("a")), 0.0);
}

TEST(Dup, MatchesSetDefinitionOnRandomMultisets) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> len(0, 30), sym(0, 7);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> c;
    int n = len(rng);
    for (int k = 0; k < n; ++k) c.push_back(std::string(1, static_cast<char>('a' + sym(rng))));
    ASSERT_DOUBLE_EQ(dup_multiset(c), dup_oracle(c));
  }
}

TEST(Dup, NumericAndBooleanCellsAlwaysDistinct) {
  auto cells = column({Text{"a"}, Text{"a"}, Numeric{1, {}}, Numeric{1, {}}, Boolean{true}, Blank{}});
  // Strings {a, a}; three further always-distinct elements.
  EXPECT_DOUBLE_EQ(dup(cells), (2.0 * 5 - 3 - 4 + 1) / (2.0 * 5));
}

TEST(Dup, RichTextUsesItsPlainText) {
  auto cells = column({RichText{"<b>x</b>"}, Text{"x"}});
  EXPECT_DOUBLE_EQ(dup(cells), dup_multiset(letters("xx")));
}

TEST(Sep, WorkedExample) {
  EXPECT_EQ(sep("DFKI; TUKL (42)"), (std::vector<std::string>{"DFKI", "TUKL", "42"}));
}

TEST(Sep, KeepsDecimalPointsBetweenDigits) {
  EXPECT_EQ(sep("3.14 and 2."), (std::vector<std::string>{"3.14", "and", "2"}));
  EXPECT_EQ(sep("a.b"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(sep("Müller, Zoë"), (std::vector<std::string>{"Müller", "Zoë"}));
  EXPECT_EQ(sep("x x x"), (std::vector<std::string>{"x"}));
  EXPECT_TRUE(sep(" ;,- ").empty());
}

TEST(Dp, WorkedExample) { EXPECT_EQ(dp(0.023), 3); }

TEST(Dp, AgreesWithShortestPrintf) {
  EXPECT_EQ(dp(5.0), 0);
  EXPECT_EQ(dp(-1.5), 1);
  EXPECT_EQ(dp(1e-20), 10);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> digits(0, 6), mant(0, 999999);
  for (int i = 0; i < 2000; ++i) {
    int d = digits(rng);
    double v = mant(rng) / std::pow(10.0, d);
    // Smallest precision that prints back to the same double.
    int expected = 0;
    for (; expected < 17; ++expected) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*f", expected, v);
      if (std::strtod(buf, nullptr) == v) break;
    }
    ASSERT_EQ(dp(v), std::min(expected, 10)) << v;
  }
}

TEST(IsInt, Accepts) {
  EXPECT_TRUE(is_int("42"));
  EXPECT_TRUE(is_int(" -7 "));
  EXPECT_TRUE(is_int("+0"));
  EXPECT_FALSE(is_int("4.2"));
  EXPECT_FALSE(is_int("-"));
  EXPECT_FALSE(is_int("1e3"));
  EXPECT_FALSE(is_int(""));
}

TEST(IsDec, RequiresDigitsAfterThePoint) {
  EXPECT_TRUE(is_dec("3.14", '.'));
  EXPECT_TRUE(is_dec("-0.5", '.'));
  EXPECT_TRUE(is_dec("1,234.5", '.'));
  EXPECT_TRUE(is_dec("1.234,5", ','));
  EXPECT_TRUE(is_dec(".5", '.'));
  EXPECT_FALSE(is_dec("3.", '.'));
  EXPECT_FALSE(is_dec("42", '.'));
  EXPECT_FALSE(is_dec("3,14", '.'));
  EXPECT_FALSE(is_dec("12,34.5", '.'));
  EXPECT_FALSE(is_dec("1,2345.5", '.'));
}

TEST(ClassifyFormat, Examples) {
  EXPECT_EQ(classify_format("MM/DD/YYYY HH:MM AM/PM"), DataFormatType::DateTime);
  EXPECT_EQ(classify_format("DD.MM.YYYY"), DataFormatType::Date);
  EXPECT_EQ(classify_format("mm-dd-yy"), DataFormatType::Date);
  EXPECT_EQ(classify_format("\"Yes\";;\"No\";"), DataFormatType::BooleanDisplay);
  EXPECT_EQ(classify_format("0.00"), DataFormatType::Other);
  EXPECT_EQ(classify_format("#,##0 ;[Red](#,##0)"), DataFormatType::Other);
  EXPECT_EQ(classify_format("h:mm"), DataFormatType::Other);
  EXPECT_EQ(classify_format(""), DataFormatType::Other);
  EXPECT_EQ(classify_format("\"Date:\" 0"), DataFormatType::Other);
}

TEST(Df, OnlyNumericCellsWithFormats) {
  EXPECT_EQ(df(Numeric{1, "DD.MM.YYYY"}), DataFormatType::Date);
  EXPECT_EQ(df(Numeric{1, std::nullopt}), DataFormatType::Other);
  EXPECT_EQ(df(Text{"01.02.2021"}), DataFormatType::Other);
}

TEST(Str, RendersEveryKind) {
  EXPECT_EQ(str(Blank{}), "");
  EXPECT_EQ(str(Boolean{true}), "true");
  EXPECT_EQ(str(Numeric{42, {}}), "42");
  EXPECT_EQ(str(Numeric{0.1, {}}), "0.1");
  EXPECT_EQ(str(RichText{"<b>a</b> b"}), "a b");
}

TEST(DateGrammar, CommonShapes) {
  EXPECT_TRUE(is_date("01.02.2021"));
  EXPECT_TRUE(is_date("2021-02-01"));
  EXPECT_TRUE(is_date("2/1/2021"));
  EXPECT_TRUE(is_date("Feb 1, 2021"));
  EXPECT_TRUE(is_datetime("02/01/2021 08:21 AM"));
  EXPECT_TRUE(is_datetime("2021-02-01 17:05:09"));
  EXPECT_FALSE(is_date("02/01/2021 08:21 AM"));
  EXPECT_FALSE(is_datetime("01.02.2021"));
  EXPECT_FALSE(is_date("31.04.2021"));
  EXPECT_FALSE(is_date("29.02.2021"));
  EXPECT_TRUE(is_date("29.02.2024"));
  EXPECT_FALSE(is_date("2021"));
  EXPECT_FALSE(is_date("DFKI"));
  EXPECT_FALSE(is_datetime("01.02.2021 25:00"));
}

TEST(DateGrammar, SlashOrderPreference) {
  auto us = DateGrammar(DateGrammar::default_patterns(true)).match_whole("02/01/2021");
  auto eu = DateGrammar(DateGrammar::default_patterns(false)).match_whole("02/01/2021");
  ASSERT_TRUE(us && eu);
  EXPECT_EQ(us->date, (CivilDate{2021, 2, 1}));
  EXPECT_EQ(eu->date, (CivilDate{2021, 1, 2}));
  // Only one reading is valid: either preference accepts it.
  auto forced = DateGrammar(DateGrammar::default_patterns(true)).match_whole("25/12/2021");
  ASSERT_TRUE(forced);
  EXPECT_EQ(forced->date, (CivilDate{2021, 12, 25}));
}

TEST(DateGrammar, CalendarOracle) {
  using namespace std::chrono;
  const DateGrammar& g = DateGrammar::standard();
  for (int y : {1900, 1999, 2000, 2021, 2024, 2100}) {
    for (int m = 1; m <= 12; ++m) {
      for (int d = 1; d <= 31; ++d) {
        bool valid = year_month_day{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}}.ok();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%02d.%02d.%04d", d, m, y);
        ASSERT_EQ(g.is_date(buf), valid) << buf;
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
        ASSERT_EQ(g.is_date(buf), valid) << buf;
        if (valid) {
          auto v = g.match_whole(buf);
          ASSERT_TRUE(v);
          EXPECT_EQ(v->date, (CivilDate{y, m, d}));
        }
      }
    }
  }
}

TEST(DateGrammar, FindLocatesEmbeddedDate) {
  auto m = DateGrammar::standard().find("due by 15.03.2021 at the latest");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->value.date, (CivilDate{2021, 3, 15}));
  EXPECT_FALSE(DateGrammar::standard().find("no date here"));
}

TEST(Partition, SplitsByKind) {
  auto cells = column({Text{"DFKI; TUKL"}, Numeric{1, {}}, Boolean{false}, RichText{"<b>x</b>"}, Blank{}, Text{"DFKI"}});
  ColumnPartition p = partition(cells);
  EXPECT_EQ(p.size(), 5u);
  EXPECT_EQ(p.strings.size(), 2u);
  EXPECT_EQ(p.numerics.size(), 1u);
  EXPECT_EQ(p.booleans.size(), 1u);
  EXPECT_EQ(p.formatted.size(), 1u);
  EXPECT_EQ(p.substrings, (std::vector<std::string>{"DFKI", "TUKL", "DFKI"}));
}
