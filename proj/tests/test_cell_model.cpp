#include <gtest/gtest.h>

#include <random>

#include "tabrml/cell_model.hpp"
#include "tabrml/html_fragment.hpp"

using namespace tabrml;

TEST(ColumnLetter, RoundTripsAcrossWidths) {
  EXPECT_EQ(column_letter(0), "A");
  EXPECT_EQ(column_letter(25), "Z");
  EXPECT_EQ(column_letter(26), "AA");
  EXPECT_EQ(column_letter(701), "ZZ");
  EXPECT_EQ(column_letter(702), "AAA");
  for (std::uint32_t c = 0; c < 20000; c += 7) EXPECT_EQ(parse_column_letter(column_letter(c)), c);
  EXPECT_FALSE(parse_column_letter(""));
  EXPECT_FALSE(parse_column_letter("a"));
  EXPECT_FALSE(parse_column_letter("A1"));
}

TEST(Sheet, SetAndReadBack) {
  Sheet s("S", 3, 2);
  s.set(1, 1, Text{"x"});
  EXPECT_EQ(s.at(1, 1), CellValue(Text{"x"}));
  EXPECT_TRUE(is_blank(s.at(0, 0)));
  EXPECT_EQ(s.cell_count(), 1u);
  s.set(1, 1, Blank{});
  EXPECT_TRUE(s.empty());
}

TEST(Sheet, RejectsOutOfRangeAndNonFinite) {
  Sheet s("S", 2, 2);
  EXPECT_THROW(s.set(2, 0, Text{"x"}), Error);
  EXPECT_THROW(s.set(0, 0, Numeric{std::nan(""), {}}), Error);
  EXPECT_THROW(s.set(0, 0, RichText{"<b>unclosed"}), HtmlError);
}

TEST(ExtractTable, HeaderIsFirstNonBlankRow) {
  Sheet s("S", 5, 7);
  s.set(1, 2, Text{"h1"});
  s.set(3, 2, Text{"h2"});
  s.set(1, 3, Numeric{1, {}});
  s.set(4, 5, Text{"x"});
  Table t = extract_table(s);
  EXPECT_EQ(t.header_row, 2u);
  EXPECT_EQ(t.entity_rows, (std::vector<std::uint32_t>{3, 5}));
  EXPECT_EQ(t.columns, (std::vector<std::uint32_t>{1, 3, 4}));
}

TEST(ExtractTable, BlankSheetHasNoTable) {
  Sheet s("Empty", 0, 0);
  EXPECT_THROW(extract_table(s), TableError);
}

TEST(Canonical, ParseSerializeIdentity) {
  Sheet s("Mixed \"name\"", 4, 3);
  s.set(0, 0, Text{"header"});
  s.set(1, 0, Boolean{true});
  s.set(2, 1, Numeric{44228.3479166667, "MM/DD/YYYY HH:MM AM/PM"});
  s.set(3, 1, Numeric{0.1, {}});
  s.set(0, 2, RichText{"a <b>b</b> <font color=\"#ff0000\">c</font>"});
  std::string text = serialize_canonical(s);
  Sheet back = parse_canonical(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(serialize_canonical(back), text);
}

TEST(Canonical, RandomSheetsRoundTrip) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> kind(0, 4), coord(0, 5);
  std::uniform_real_distribution<double> num(-1e6, 1e6);
  for (int iter = 0; iter < 200; ++iter) {
    Sheet s("S" + std::to_string(iter), 6, 6);
    for (int k = 0; k < 12; ++k) {
      auto c = static_cast<std::uint32_t>(coord(rng));
      auto r = static_cast<std::uint32_t>(coord(rng));
      switch (kind(rng)) {
        case 0: s.set(c, r, Boolean{coord(rng) % 2 == 0}); break;
        case 1: s.set(c, r, Numeric{num(rng), coord(rng) % 2 ? std::optional<std::string>("0.00") : std::nullopt}); break;
        case 2: s.set(c, r, Text{"té\n\"" + std::to_string(k)}); break;
        case 3: s.set(c, r, RichText{"<i>x</i> &amp; y"}); break;
        default: s.set(c, r, Blank{}); break;
      }
    }
    std::string text = serialize_canonical(s);
    Sheet back = parse_canonical(text);
    ASSERT_EQ(back, s) << text;
    ASSERT_EQ(serialize_canonical(back), text);
  }
}

TEST(Canonical, ErrorsNameTheField) {
  try {
    parse_canonical(R"({"name":"S","width":1,"height":1,"cells":[{"col":0,"row":0,"kind":"numeric","value":"x"}]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("cells[0].value"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_canonical("{"), ParseError);
  EXPECT_THROW(parse_canonical(R"({"name":"S","width":1,"height":1,"cells":[],"extra":1})"), ParseError);
  EXPECT_THROW(parse_canonical(R"({"name":"S","width":1,"height":1,"cells":[{"col":3,"row":0,"kind":"text","text":"a"}]})"),
               ParseError);
}

TEST(HtmlFragment, ParsesNestedFormatting) {
  auto runs = parse_fragment("a<b>b<i>c</i></b><font color=\"#FF0000\">d</font>");
  ASSERT_EQ(runs.size(), 4u);
  EXPECT_EQ(runs[0].text, "a");
  EXPECT_TRUE(runs[0].format.plain());
  EXPECT_TRUE(runs[1].format.bold);
  EXPECT_TRUE(runs[2].format.bold && runs[2].format.italic);
  EXPECT_EQ(runs[3].format.color, "#ff0000");
}

TEST(HtmlFragment, RejectsForeignTagsAndBadNesting) {
  EXPECT_THROW(parse_fragment("<script>x</script>"), HtmlError);
  EXPECT_THROW(parse_fragment("<b><i>x</b></i>"), HtmlError);
  EXPECT_THROW(parse_fragment("<font color=\"red\">x</font>"), HtmlError);
}

TEST(HtmlFragment, BlackIsNotColored) {
  Formatting f;
  f.color = "#000000";
  EXPECT_TRUE(f.plain());
  EXPECT_EQ(format_key(f), "unformatted");
}

TEST(HtmlFragment, FormatKeyRoundTrip) {
  for (int mask = 0; mask < 32; ++mask) {
    Formatting f{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, (mask & 8) != 0, (mask & 16) ? "#00ff00" : ""};
    EXPECT_EQ(parse_format_key(format_key(f)), f) << format_key(f);
  }
}

TEST(HtmlFragment, RenderThenParseKeepsTextAndFormatting) {
  std::vector<TextRun> runs = {{"x ", {}}, {"y<", {true, false, false, false, "#ff0000"}}, {"z", {false, true, true, true, ""}}};
  std::string html = render_fragment(runs);
  EXPECT_EQ(html, "x <font color=\"#ff0000\"><b>y&lt;</b></font><i><u><strike>z</strike></u></i>");
  EXPECT_EQ(parse_fragment(html), runs);
  EXPECT_EQ(strip_tags(html), "x y<z");
}
