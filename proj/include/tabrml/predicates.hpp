#pragma once

// Auxiliary functions and predicates shared by every template heuristic:
// decimal places, data format types, string values, token separation,
// textual number/date recognition and the degree of duplication.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tabrml/cell_model.hpp"
#include "tabrml/date_grammar.hpp"
#include "tabrml/detail/numbers.hpp"
#include "tabrml/error.hpp"
#include "tabrml/html_fragment.hpp"

namespace tabrml {

inline constexpr int kMaxDecimalPlaces = 10;

// Number of decimal places in the shortest round-trip rendering, capped at 10.
inline int dp(double value) {
  if (!std::isfinite(value)) throw Error("dp: value is not finite");
  std::string s = detail::shortest_fixed(value);
  auto dot = s.find('.');
  if (dot == std::string::npos) return 0;
  return std::min(static_cast<int>(s.size() - dot - 1), kMaxDecimalPlaces);
}

enum class DataFormatType { Date, DateTime, BooleanDisplay, Other };

inline std::string_view to_string(DataFormatType t) {
  switch (t) {
    case DataFormatType::Date: return "date";
    case DataFormatType::DateTime: return "datetime";
    case DataFormatType::BooleanDisplay: return "boolean-display";
    case DataFormatType::Other: return "other";
  }
  return "other";
}

namespace detail {

// Splits a number format into its ';'-separated sections, ignoring
// separators inside quoted literals.
inline std::vector<std::string> format_sections(std::string_view format) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < format.size(); ++i) {
    char c = format[i];
    if (c == '"') quoted = !quoted;
    if (!quoted && c == '\\' && i + 1 < format.size()) {
      out.back() += c;
      out.back() += format[++i];
      continue;
    }
    if (!quoted && c == ';') {
      out.emplace_back();
      continue;
    }
    out.back() += c;
  }
  return out;
}

struct SectionInfo {
  bool has_date = false;
  bool has_time = false;
  bool has_literal = false;
  bool has_placeholder = false;  // anything outside quotes besides spacing
};

inline SectionInfo scan_section(std::string_view s) {
  SectionInfo info;
  // Collect unquoted letters; 'm' is ambiguous and resolved afterwards.
  struct Letter {
    char c;
    std::size_t index;
  };
  std::vector<Letter> letters;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '"') {
      std::size_t end = s.find('"', i + 1);
      info.has_literal = true;
      if (end == std::string_view::npos) break;
      i = end;
      continue;
    }
    if (c == '\\' || c == '_' || c == '*') {
      ++i;  // escaped character, spacing or fill character
      info.has_literal = info.has_literal || c == '\\';
      continue;
    }
    if (c == '[') {
      std::size_t end = s.find(']', i);
      if (end == std::string_view::npos) break;
      std::string inner = lower(s.substr(i + 1, end - i - 1));
      // Elapsed-time brackets such as [h] or [mm] are time tokens; colors,
      // locales and conditions are not.
      if (!inner.empty() && inner.find_first_not_of(inner[0]) == std::string::npos &&
          (inner[0] == 'h' || inner[0] == 'm' || inner[0] == 's'))
        info.has_time = true;
      i = end;
      continue;
    }
    if (c == ' ' || c == '\t') continue;
    info.has_placeholder = true;
    char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == 'a' && (lower(s.substr(i, 5)) == "am/pm" || lower(s.substr(i, 3)) == "a/p")) {
      info.has_time = true;
      i += lower(s.substr(i, 5)) == "am/pm" ? 4 : 2;
      continue;
    }
    if (l == 'd' || l == 'y' || l == 'm' || l == 'h' || l == 's') letters.push_back({l, i});
  }
  for (std::size_t k = 0; k < letters.size(); ++k) {
    char c = letters[k].c;
    if (c == 'd' || c == 'y') {
      info.has_date = true;
    } else if (c == 'h' || c == 's') {
      info.has_time = true;
    } else {
      // 'm' directly after an hour token or directly before a seconds token
      // means minutes.
      std::size_t a = k;
      while (a > 0 && letters[a - 1].c == 'm') --a;
      std::size_t b = k;
      while (b + 1 < letters.size() && letters[b + 1].c == 'm') ++b;
      bool minutes = (a > 0 && letters[a - 1].c == 'h') || (b + 1 < letters.size() && letters[b + 1].c == 's');
      if (minutes)
        info.has_time = true;
      else
        info.has_date = true;
    }
  }
  return info;
}

}  // namespace detail

// Classifies a spreadsheet number format. Total: unknown formats are Other.
inline DataFormatType classify_format(std::string_view format) {
  if (format.empty()) return DataFormatType::Other;
  std::vector<std::string> sections = detail::format_sections(format);

  // Text-only multi-section formats such as "Yes";;"No"; display booleans.
  if (sections.size() >= 2) {
    bool text_only = true;
    int literal_sections = 0;
    for (const std::string& s : sections) {
      detail::SectionInfo info = detail::scan_section(s);
      if (info.has_placeholder) text_only = false;
      literal_sections += info.has_literal;
    }
    if (text_only && literal_sections >= 2) return DataFormatType::BooleanDisplay;
  }

  detail::SectionInfo first = detail::scan_section(sections.front());
  if (first.has_date && first.has_time) return DataFormatType::DateTime;
  if (first.has_date) return DataFormatType::Date;
  return DataFormatType::Other;
}

// df over a cell; non-numeric cells and missing formats are Other.
inline DataFormatType df(const CellValue& value) {
  const auto* n = std::get_if<Numeric>(&value);
  if (!n || !n->format) return DataFormatType::Other;
  return classify_format(*n->format);
}

// String value of a cell.
inline std::string str(const CellValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Blank>) return {};
        else if constexpr (std::is_same_v<T, Boolean>) return v.flag ? "true" : "false";
        else if constexpr (std::is_same_v<T, Numeric>) return detail::shortest_repr(v.value);
        else if constexpr (std::is_same_v<T, Text>) return v.content;
        else return strip_tags(v.html);
      },
      value);
}

namespace detail {

// Decodes the code point starting at s[i] and returns its byte length.
inline std::size_t utf8_decode(std::string_view s, std::size_t i, std::uint32_t& cp) {
  auto b = static_cast<unsigned char>(s[i]);
  std::size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 1;
  if (i + len > s.size()) len = 1;
  if (len == 1) {
    cp = b;
    return 1;
  }
  cp = b & (0xFF >> (len + 1));
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  return len;
}

// Letters and digits, including non-ASCII letters. Latin-1 punctuation and
// the general/CJK punctuation blocks act as delimiters.
inline bool is_word_codepoint(std::uint32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  if (cp >= 0xA0 && cp <= 0xBF) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

// Splits text on maximal runs of delimiters (anything that is not a letter, a
// digit, or a '.' between two digits). Returns distinct tokens in order of
// first occurrence.
inline std::vector<std::string> sep(std::string_view text) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && seen.insert(token).second) out.push_back(token);
    token.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    char c = text[i];
    if (c == '.' && i > 0 && i + 1 < text.size() && detail::is_digit(text[i - 1]) && detail::is_digit(text[i + 1])) {
      token += c;
      ++i;
      continue;
    }
    std::uint32_t cp = 0;
    std::size_t len = detail::utf8_decode(text, i, cp);
    if (detail::is_word_codepoint(cp))
      token.append(text.substr(i, len));
    else
      flush();
    i += len;
  }
  flush();
  return out;
}

// Optional sign followed by digits.
inline bool is_int(std::string_view text) {
  text = detail::trim(text);
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) text.remove_prefix(1);
  return !text.empty() && std::all_of(text.begin(), text.end(), detail::is_digit);
}

// Optional sign, an integer part (plain digits or groups of three separated
// by the other separator), the decimal point and at least one digit.
inline bool is_dec(std::string_view text, char decimal_point) {
  const char group = decimal_point == ',' ? '.' : ',';
  text = detail::trim(text);
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) text.remove_prefix(1);
  std::size_t point = text.find(decimal_point);
  if (point == std::string_view::npos) return false;
  std::string_view whole = text.substr(0, point);
  std::string_view frac = text.substr(point + 1);
  if (frac.empty() || !std::all_of(frac.begin(), frac.end(), detail::is_digit)) return false;
  if (std::all_of(whole.begin(), whole.end(), detail::is_digit)) return true;
  // Grouped integer part: d{1,3}(G d{3})+
  std::size_t first = whole.find(group);
  if (first == 0 || first > 3) return false;
  if (!std::all_of(whole.begin(), whole.begin() + static_cast<std::ptrdiff_t>(first), detail::is_digit)) return false;
  for (std::size_t i = first; i < whole.size(); i += 4) {
    if (whole[i] != group || i + 4 > whole.size()) return false;
    for (std::size_t k = 1; k <= 3; ++k)
      if (!detail::is_digit(whole[i + k])) return false;
  }
  return true;
}

inline bool is_date(std::string_view text, const DateGrammar& grammar = DateGrammar::standard()) {
  return grammar.is_date(text);
}

inline bool is_datetime(std::string_view text, const DateGrammar& grammar = DateGrammar::standard()) {
  return grammar.is_datetime(text);
}

namespace detail {

// dup over `strings` plus `always_distinct` further elements (numeric and
// boolean cells), each of which counts once towards both U and P.
inline double dup_core(std::span<const std::string> strings, std::size_t always_distinct) {
  const std::size_t n = strings.size() + always_distinct;
  if (n <= 1) return 0.0;
  std::unordered_map<std::string_view, std::size_t> freq;
  for (const std::string& s : strings) ++freq[s];
  std::size_t unique = always_distinct;
  for (const auto& [_, count] : freq) unique += count == 1;
  const std::size_t distinct = freq.size() + always_distinct;
  return static_cast<double>(2 * n + 1 - unique - distinct) / static_cast<double>(2 * n);
}

}  // namespace detail

// Degree of duplication of a column, (2|C| - |U| - |P| + 1) / (2|C|).
// Blank cells are ignored; numeric and boolean cells are always distinct.
inline double dup(std::span<const Cell> cells) {
  std::vector<std::string> strings;
  std::size_t distinct = 0;
  for (const Cell& c : cells) {
    switch (kind_of(c.value)) {
      case CellKind::Blank: break;
      case CellKind::Boolean:
      case CellKind::Numeric: ++distinct; break;
      default: strings.push_back(str(c.value));
    }
  }
  return detail::dup_core(strings, distinct);
}

// dup applied to bare string values, each occurrence acting as a cell.
inline double dup_multiset(std::span<const std::string> values, std::size_t always_distinct = 0) {
  return detail::dup_core(values, always_distinct);
}

// The non-blank cells of one column split by value kind.
struct ColumnPartition {
  std::vector<Cell> cells;      // C
  std::vector<Cell> booleans;   // B
  std::vector<Cell> numerics;   // N
  std::vector<Cell> strings;    // S
  std::vector<Cell> formatted;  // F (rich text)
  std::vector<std::string> substrings;  // multiset of sep(str(c)) over S

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
};

inline ColumnPartition partition(std::span<const Cell> cells) {
  ColumnPartition p;
  for (const Cell& c : cells) {
    switch (kind_of(c.value)) {
      case CellKind::Blank: continue;
      case CellKind::Boolean: p.booleans.push_back(c); break;
      case CellKind::Numeric: p.numerics.push_back(c); break;
      case CellKind::Text: {
        p.strings.push_back(c);
        for (std::string& s : sep(str(c.value))) p.substrings.push_back(std::move(s));
        break;
      }
      case CellKind::RichText: p.formatted.push_back(c); break;
    }
    p.cells.push_back(c);
  }
  return p;
}

}  // namespace tabrml
