#pragma once

// Date and date-time recognition for common English and German spellings.
//
// A date pattern is a string of tokens:
//   YYYY  four-digit year          YY   two-digit year (00-29 -> 20xx, 30-99 -> 19xx)
//   MMMM  full month name          MMM  abbreviated month name, optional trailing '.'
//   MM    two-digit month          M    one- or two-digit month
//   DD    two-digit day            D    one- or two-digit day
// Any other character is a literal; a space matches one or more whitespace
// characters. Month names are matched case-insensitively in English and German.
//
// A date-time is a date followed by whitespace, "T" or ", " and a time
// H(H):MM[:SS] with an optional AM/PM marker.

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tabrml/error.hpp"

namespace tabrml {

struct CivilDate {
  int year = 1970;
  int month = 1;
  int day = 1;
  friend auto operator<=>(const CivilDate&, const CivilDate&) = default;
};

struct TimeOfDay {
  int hour = 0;
  int minute = 0;
  int second = 0;
  friend auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;
};

struct DateTimeValue {
  CivilDate date;
  std::optional<TimeOfDay> time;
  friend bool operator==(const DateTimeValue&, const DateTimeValue&) = default;
};

inline bool is_leap_year(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return days[static_cast<std::size_t>(m - 1)];
}

inline bool is_valid(const CivilDate& d) {
  return d.year >= 1 && d.year <= 9999 && d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

inline std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

// xsd:date lexical form, YYYY-MM-DD.
inline std::string to_xsd_date(const CivilDate& d) {
  return pad(d.year, 4) + "-" + pad(d.month, 2) + "-" + pad(d.day, 2);
}

// xsd:dateTime lexical form, YYYY-MM-DDTHH:MM:SS.
inline std::string to_xsd_datetime(const CivilDate& d, const TimeOfDay& t) {
  return to_xsd_date(d) + "T" + pad(t.hour, 2) + ":" + pad(t.minute, 2) + ":" + pad(t.second, 2);
}

struct DateMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  DateTimeValue value;
};

class DateGrammar {
 public:
  // Order matters: the first pattern producing a valid calendar date wins.
  static std::vector<std::string> default_patterns(bool slash_month_first = true) {
    std::vector<std::string> p{"YYYY-MM-DD"};
    if (slash_month_first)
      p.insert(p.end(), {"MM/DD/YYYY", "M/D/YYYY", "D/M/YYYY"});
    else
      p.insert(p.end(), {"DD/MM/YYYY", "D/M/YYYY", "M/D/YYYY"});
    p.insert(p.end(), {"DD.MM.YYYY", "D.M.YYYY", "D.M.YY", "MMM D, YYYY", "MMMM D, YYYY", "D. MMMM YYYY",
                       "D. MMM YYYY"});
    return p;
  }

  DateGrammar() : DateGrammar(default_patterns()) {}

  explicit DateGrammar(const std::vector<std::string>& patterns) {
    for (const std::string& p : patterns) patterns_.push_back(compile(p));
  }

  static const DateGrammar& standard() {
    static const DateGrammar grammar;
    return grammar;
  }

  // Whole (trimmed) text is a date without time.
  bool is_date(std::string_view text) const {
    auto m = match_whole(text);
    return m && !m->time;
  }

  // Whole (trimmed) text is a date followed by a time.
  bool is_datetime(std::string_view text) const {
    auto m = match_whole(text);
    return m && m->time;
  }

  std::optional<DateTimeValue> match_whole(std::string_view text) const {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    for (const Pattern& p : patterns_) {
      auto r = match_at(p, text, 0);
      if (r && r->end == text.size()) return r->value;
    }
    return std::nullopt;
  }

  // Leftmost date occurring in `text` on word boundaries; among matches at the
  // same position the longest one wins.
  std::optional<DateMatch> find(std::string_view text) const {
    for (std::size_t start = 0; start < text.size(); ++start) {
      if (start > 0 && is_word(text[start - 1])) continue;
      std::optional<DateMatch> best;
      for (const Pattern& p : patterns_) {
        auto r = match_at(p, text, start);
        if (!r || (r->end < text.size() && is_word(text[r->end]))) continue;
        if (!best || r->end > best->end) best = r;
      }
      if (best) return best;
    }
    return std::nullopt;
  }

 private:
  enum class Tok { Year4, Year2, MonthName, MonthAbbr, Month2, Month, Day2, Day, Space, Literal };
  struct Token {
    Tok kind;
    char literal = 0;
  };
  using Pattern = std::vector<Token>;

  static bool is_word(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  static Pattern compile(std::string_view p) {
    Pattern out;
    std::size_t i = 0;
    auto take = [&](std::string_view tok) {
      if (p.substr(i, tok.size()) != tok) return false;
      i += tok.size();
      return true;
    };
    while (i < p.size()) {
      if (take("YYYY")) out.push_back({Tok::Year4});
      else if (take("YY")) out.push_back({Tok::Year2});
      else if (take("MMMM")) out.push_back({Tok::MonthName});
      else if (take("MMM")) out.push_back({Tok::MonthAbbr});
      else if (take("MM")) out.push_back({Tok::Month2});
      else if (take("M")) out.push_back({Tok::Month});
      else if (take("DD")) out.push_back({Tok::Day2});
      else if (take("D")) out.push_back({Tok::Day});
      else if (p[i] == ' ') {
        out.push_back({Tok::Space});
        ++i;
      } else {
        out.push_back({Tok::Literal, p[i]});
        ++i;
      }
    }
    int years = 0, months = 0, days = 0;
    for (const Token& t : out) {
      years += t.kind == Tok::Year4 || t.kind == Tok::Year2;
      months += t.kind == Tok::MonthName || t.kind == Tok::MonthAbbr || t.kind == Tok::Month2 || t.kind == Tok::Month;
      days += t.kind == Tok::Day2 || t.kind == Tok::Day;
    }
    if (years != 1 || months != 1 || days != 1)
      throw Error("date pattern '" + std::string(p) + "' needs exactly one year, month and day field");
    return out;
  }

  static std::optional<int> digits(std::string_view s, std::size_t& pos, std::size_t min, std::size_t max) {
    std::size_t n = 0;
    int v = 0;
    while (n < max && pos + n < s.size() && std::isdigit(static_cast<unsigned char>(s[pos + n]))) {
      v = v * 10 + (s[pos + n] - '0');
      ++n;
    }
    if (n < min) return std::nullopt;
    // A fixed-width field must not be followed by more digits.
    if (pos + n < s.size() && std::isdigit(static_cast<unsigned char>(s[pos + n]))) return std::nullopt;
    pos += n;
    return v;
  }

  static std::optional<int> month_name(std::string_view s, std::size_t& pos, bool abbreviated) {
    static const std::vector<std::pair<std::string_view, int>> full{
        {"january", 1},  {"february", 2}, {"march", 3},    {"april", 4},     {"may", 5},
        {"june", 6},     {"july", 7},     {"august", 8},   {"september", 9}, {"october", 10},
        {"november", 11}, {"december", 12}, {"januar", 1},   {"februar", 2},   {"m\xc3\xa4rz", 3},
        {"maerz", 3},    {"mai", 5},      {"juni", 6},     {"juli", 7},      {"oktober", 10},
        {"dezember", 12}};
    static const std::vector<std::pair<std::string_view, int>> abbr{
        {"jan", 1}, {"feb", 2}, {"mar", 3}, {"m\xc3\xa4r", 3}, {"mrz", 3}, {"apr", 4}, {"may", 5},
        {"mai", 5}, {"jun", 6}, {"jul", 7}, {"aug", 8},       {"sept", 9}, {"sep", 9}, {"oct", 10},
        {"okt", 10}, {"nov", 11}, {"dec", 12}, {"dez", 12}};
    const auto& table = abbreviated ? abbr : full;
    std::size_t best_len = 0;
    int best = 0;
    for (const auto& [name, month] : table) {
      if (pos + name.size() > s.size() || name.size() <= best_len) continue;
      bool eq = true;
      for (std::size_t k = 0; k < name.size() && eq; ++k)
        eq = std::tolower(static_cast<unsigned char>(s[pos + k])) == static_cast<unsigned char>(name[k]);
      if (!eq) continue;
      std::size_t after = pos + name.size();
      if (after < s.size() && std::isalpha(static_cast<unsigned char>(s[after]))) continue;
      best_len = name.size();
      best = month;
    }
    if (best_len == 0) return std::nullopt;
    pos += best_len;
    if (abbreviated && pos < s.size() && s[pos] == '.') ++pos;
    return best;
  }

  static std::optional<TimeOfDay> parse_time(std::string_view s, std::size_t& pos) {
    std::size_t p = pos;
    auto hour = digits(s, p, 1, 2);
    if (!hour || p >= s.size() || s[p] != ':') return std::nullopt;
    ++p;
    auto minute = digits(s, p, 2, 2);
    if (!minute) return std::nullopt;
    int second = 0;
    if (p < s.size() && s[p] == ':') {
      std::size_t q = p + 1;
      auto sec = digits(s, q, 2, 2);
      if (sec) {
        second = *sec;
        p = q;
      }
    }
    // Optional AM/PM marker.
    std::size_t q = p;
    while (q < s.size() && s[q] == ' ') ++q;
    auto marker = [&](std::string_view m) {
      if (q + m.size() > s.size()) return false;
      for (std::size_t k = 0; k < m.size(); ++k)
        if (std::tolower(static_cast<unsigned char>(s[q + k])) != m[k]) return false;
      std::size_t after = q + m.size();
      return after == s.size() || !std::isalnum(static_cast<unsigned char>(s[after]));
    };
    int h = *hour;
    if (marker("am") || marker("pm") || marker("a.m.") || marker("p.m.")) {
      bool pm = std::tolower(static_cast<unsigned char>(s[q])) == 'p';
      if (h < 1 || h > 12) return std::nullopt;
      h = h % 12 + (pm ? 12 : 0);
      q += (s[q + 1] == '.') ? 4 : 2;
      p = q;
    } else if (h > 23) {
      return std::nullopt;
    }
    if (*minute > 59 || second > 59) return std::nullopt;
    pos = p;
    return TimeOfDay{h, *minute, second};
  }

  static std::optional<DateMatch> match_at(const Pattern& pattern, std::string_view s, std::size_t start) {
    std::size_t pos = start;
    CivilDate d{0, 0, 0};
    for (const Token& t : pattern) {
      std::optional<int> v;
      switch (t.kind) {
        case Tok::Year4: v = digits(s, pos, 4, 4); if (v) d.year = *v; break;
        case Tok::Year2: v = digits(s, pos, 2, 2); if (v) d.year = *v < 30 ? 2000 + *v : 1900 + *v; break;
        case Tok::MonthName: v = month_name(s, pos, false); if (v) d.month = *v; break;
        case Tok::MonthAbbr: v = month_name(s, pos, true); if (v) d.month = *v; break;
        case Tok::Month2: v = digits(s, pos, 2, 2); if (v) d.month = *v; break;
        case Tok::Month: v = digits(s, pos, 1, 2); if (v) d.month = *v; break;
        case Tok::Day2: v = digits(s, pos, 2, 2); if (v) d.day = *v; break;
        case Tok::Day: v = digits(s, pos, 1, 2); if (v) d.day = *v; break;
        case Tok::Space: {
          std::size_t n = pos;
          while (n < s.size() && std::isspace(static_cast<unsigned char>(s[n]))) ++n;
          if (n > pos) v = 0;
          pos = n;
          break;
        }
        case Tok::Literal:
          if (pos < s.size() && s[pos] == t.literal) {
            ++pos;
            v = 0;
          }
          break;
      }
      if (!v) return std::nullopt;
    }
    if (!is_valid(d)) return std::nullopt;

    DateMatch m{start, pos, {d, std::nullopt}};
    // Optional time part.
    std::size_t p = pos;
    if (p < s.size() && s[p] == 'T') {
      ++p;
    } else if (p + 1 < s.size() && s[p] == ',' && s[p + 1] == ' ') {
      p += 2;
      while (p < s.size() && s[p] == ' ') ++p;
    } else {
      std::size_t n = p;
      while (n < s.size() && std::isspace(static_cast<unsigned char>(s[n]))) ++n;
      if (n == p) return m;
      p = n;
    }
    if (auto t = parse_time(s, p)) {
      m.value.time = t;
      m.end = p;
    }
    return m;
  }

  std::vector<Pattern> patterns_;
};

}  // namespace tabrml
