#pragma once

// Transformation functions invoked from object maps, the cell accessors that
// feed them, and object map evaluation.
//
// Every function is total over cell content: unparseable input yields
// nothing rather than an error. The only failure is a malformed rich text
// fragment handed to an extraction function.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tabrml/aho_corasick.hpp"
#include "tabrml/cell_model.hpp"
#include "tabrml/date_grammar.hpp"
#include "tabrml/detail/numbers.hpp"
#include "tabrml/error.hpp"
#include "tabrml/html_fragment.hpp"
#include "tabrml/predicates.hpp"

namespace tabrml {

namespace xsd {
inline constexpr std::string_view kNamespace = "http://www.w3.org/2001/XMLSchema#";
inline const std::string kString = "http://www.w3.org/2001/XMLSchema#string";
inline const std::string kInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline const std::string kDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline const std::string kBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline const std::string kDate = "http://www.w3.org/2001/XMLSchema#date";
inline const std::string kDateTime = "http://www.w3.org/2001/XMLSchema#dateTime";
}  // namespace xsd

enum class FunctionId {
  ParseNumber,
  ParseBoolean,
  ParseDate,
  ParseDateTime,
  EntityLinking,
  GetEntitiesByTag,
  GetEntitiesByColor,
  GetEntitiesByUnformatted,
};

inline constexpr std::array<FunctionId, 8> kAllFunctions{
    FunctionId::ParseNumber,     FunctionId::ParseBoolean,     FunctionId::ParseDate,
    FunctionId::ParseDateTime,   FunctionId::EntityLinking,    FunctionId::GetEntitiesByTag,
    FunctionId::GetEntitiesByColor, FunctionId::GetEntitiesByUnformatted};

inline std::string_view function_name(FunctionId id) {
  switch (id) {
    case FunctionId::ParseNumber: return "parseNumber";
    case FunctionId::ParseBoolean: return "parseBoolean";
    case FunctionId::ParseDate: return "parseDate";
    case FunctionId::ParseDateTime: return "parseDateTime";
    case FunctionId::EntityLinking: return "entityLinking";
    case FunctionId::GetEntitiesByTag: return "getEntitiesByTag";
    case FunctionId::GetEntitiesByColor: return "getEntitiesByColor";
    case FunctionId::GetEntitiesByUnformatted: return "getEntitiesByUnformatted";
  }
  return "";
}

inline std::optional<FunctionId> function_from_name(std::string_view name) {
  for (FunctionId id : kAllFunctions)
    if (function_name(id) == name) return id;
  return std::nullopt;
}

inline bool is_extraction(FunctionId id) {
  return id == FunctionId::GetEntitiesByTag || id == FunctionId::GetEntitiesByColor ||
         id == FunctionId::GetEntitiesByUnformatted;
}

enum class TermType { Iri, Literal };

// Parameter names of the public mapping vocabulary.
namespace param {
inline constexpr std::string_view kDecimalPoint = "decimalPoint";
inline constexpr std::string_view kIntegerOnly = "integerOnly";
inline constexpr std::string_view kAllMatches = "allMatches";
inline constexpr std::string_view kTrueList = "trueList";
inline constexpr std::string_view kFalseList = "falseList";
inline constexpr std::string_view kTag = "tag";
inline constexpr std::string_view kColorHex = "colorHex";
inline constexpr std::string_view kFormatKey = "formatKey";
inline constexpr std::string_view kGazetteer = "gazetteer";
inline constexpr std::string_view kInnerTermType = "innerTermType";
inline constexpr std::string_view kInnerDatatype = "innerDatatype";
}  // namespace param

struct FunctionCall {
  FunctionId function = FunctionId::ParseNumber;
  // Parameter name -> values. Most parameters are single valued; the
  // boolean lexicons are lists.
  std::map<std::string, std::vector<std::string>, std::less<>> params;
  // Subroutine applied to every span an extraction function yields.
  std::shared_ptr<const FunctionCall> inner;

  FunctionCall() = default;
  explicit FunctionCall(FunctionId id) : function(id) {}

  FunctionCall& set(std::string_view key, std::string value) {
    params[std::string(key)] = {std::move(value)};
    return *this;
  }
  FunctionCall& set_list(std::string_view key, std::vector<std::string> values) {
    params[std::string(key)] = std::move(values);
    return *this;
  }

  std::optional<std::string> get(std::string_view key) const {
    auto it = params.find(key);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    return it->second.front();
  }
  std::vector<std::string> get_list(std::string_view key) const {
    auto it = params.find(key);
    return it == params.end() ? std::vector<std::string>{} : it->second;
  }
  bool flag(std::string_view key) const { return get(key) == "true"; }

  friend bool operator==(const FunctionCall& a, const FunctionCall& b) {
    if (a.function != b.function || a.params != b.params) return false;
    if (!a.inner || !b.inner) return !a.inner && !b.inner;
    return *a.inner == *b.inner;
  }
};

struct Nothing {
  friend bool operator==(const Nothing&, const Nothing&) = default;
};

struct LiteralValue {
  std::string lexical;
  std::string datatype;
  friend bool operator==(const LiteralValue&, const LiteralValue&) = default;
};

struct ResourceValue {
  std::string iri;
  friend bool operator==(const ResourceValue&, const ResourceValue&) = default;
};

using FnValue = std::variant<Nothing, LiteralValue, ResourceValue>;

inline bool is_nothing(const FnValue& v) { return std::holds_alternative<Nothing>(v); }

// Everything a function needs besides its input.
struct FunctionContext {
  const DateGrammar* grammar = &DateGrammar::standard();
  // Resolves a gazetteer IRI; returns nullptr if unknown.
  std::function<const CompiledGazetteer*(std::string_view)> gazetteers;
};

inline const std::vector<std::string>& default_true_lexicon() {
  static const std::vector<std::string> words{"true", "yes", "y", "x", "1", "ja", "j", "wahr", "ok"};
  return words;
}

inline const std::vector<std::string>& default_false_lexicon() {
  static const std::vector<std::string> words{"false", "no", "n", "0", "nein", "falsch", "-"};
  return words;
}

// ---------------------------------------------------------------------------
// parseNumber

namespace detail {

struct NumberToken {
  std::string integer;   // digits only, separators removed
  std::string fraction;  // digits after the decimal point, may be empty
  bool negative = false;
  std::size_t end = 0;
};

// Finds the next number at or after `from`. A sign only counts at the start
// of a token; groups of exactly three digits may be separated by the
// character that is not the decimal point.
inline std::optional<NumberToken> next_number(std::string_view s, std::size_t from, char point) {
  const char group = point == ',' ? '.' : ',';
  for (std::size_t i = from; i < s.size(); ++i) {
    bool sign = (s[i] == '-' || s[i] == '+') && i + 1 < s.size() && is_digit(s[i + 1]) &&
                (i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1])));
    if (!sign && !is_digit(s[i])) continue;
    if (!sign && i > 0 && is_digit(s[i - 1])) continue;
    NumberToken t;
    std::size_t p = i;
    if (sign) t.negative = s[p++] == '-';
    while (p < s.size() && is_digit(s[p])) t.integer += s[p++];
    // Thousands groups, only after a leading group of one to three digits.
    if (t.integer.size() <= 3) {
      while (p + 3 < s.size() && s[p] == group && is_digit(s[p + 1]) && is_digit(s[p + 2]) && is_digit(s[p + 3]) &&
             (p + 4 >= s.size() || !is_digit(s[p + 4]))) {
        t.integer.append(s.substr(p + 1, 3));
        p += 4;
      }
    }
    if (p + 1 < s.size() && s[p] == point && is_digit(s[p + 1])) {
      ++p;
      while (p < s.size() && is_digit(s[p])) t.fraction += s[p++];
    }
    t.end = p;
    return t;
  }
  return std::nullopt;
}

inline LiteralValue number_literal(const NumberToken& t, bool integer_only) {
  std::string whole = t.integer;
  std::size_t nz = whole.find_first_not_of('0');
  whole = nz == std::string::npos ? "0" : whole.substr(nz);
  bool zero = whole == "0" && t.fraction.find_first_not_of('0') == std::string::npos;
  std::string lexical = (t.negative && !zero ? "-" : "") + whole;
  if (!integer_only && !t.fraction.empty()) lexical += "." + t.fraction;
  return {lexical, integer_only ? xsd::kInteger : xsd::kDecimal};
}

inline std::string text_of(const CellValue& v) {
  if (const auto* t = std::get_if<Text>(&v)) return t->content;
  if (const auto* r = std::get_if<RichText>(&v)) return strip_tags(r->html);
  return {};
}

}  // namespace detail

// Numbers pass through (integerOnly requires no decimal places); text yields
// the first number found in it, normalized to the XSD lexical form.
inline FnValue parse_number(const CellValue& input, char decimal_point = '.', bool integer_only = false) {
  if (const auto* n = std::get_if<Numeric>(&input)) {
    if (integer_only) {
      if (dp(n->value) != 0) return Nothing{};
      return LiteralValue{detail::integer_text(n->value), xsd::kInteger};
    }
    return LiteralValue{detail::shortest_fixed(n->value), xsd::kDecimal};
  }
  std::string text = detail::text_of(input);
  auto token = detail::next_number(text, 0, decimal_point);
  if (!token) return Nothing{};
  if (integer_only && !token->fraction.empty()) return Nothing{};
  return detail::number_literal(*token, integer_only);
}

// Every number in the text, e.g. the items of an integer list "42, 15; 3".
inline std::vector<FnValue> parse_numbers(const CellValue& input, char decimal_point = '.', bool integer_only = false) {
  std::vector<FnValue> out;
  if (std::holds_alternative<Numeric>(input)) {
    FnValue v = parse_number(input, decimal_point, integer_only);
    if (!is_nothing(v)) out.push_back(std::move(v));
    return out;
  }
  std::string text = detail::text_of(input);
  std::size_t pos = 0;
  while (auto token = detail::next_number(text, pos, decimal_point)) {
    pos = token->end;
    if (integer_only && !token->fraction.empty()) continue;
    out.emplace_back(detail::number_literal(*token, integer_only));
  }
  return out;
}

// ---------------------------------------------------------------------------
// parseBoolean

inline std::string normalize_token(std::string_view s) {
  std::string out(detail::trim(s));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline FnValue parse_boolean(const CellValue& input, const std::vector<std::string>& true_list,
                             const std::vector<std::string>& false_list) {
  if (const auto* b = std::get_if<Boolean>(&input)) return LiteralValue{b->flag ? "true" : "false", xsd::kBoolean};
  if (const auto* n = std::get_if<Numeric>(&input)) {
    if (n->value == 1.0) return LiteralValue{"true", xsd::kBoolean};
    if (n->value == 0.0) return LiteralValue{"false", xsd::kBoolean};
    return Nothing{};
  }
  std::string token = normalize_token(detail::text_of(input));
  if (token.empty()) return Nothing{};
  for (const std::string& t : true_list)
    if (normalize_token(t) == token) return LiteralValue{"true", xsd::kBoolean};
  for (const std::string& f : false_list)
    if (normalize_token(f) == token) return LiteralValue{"false", xsd::kBoolean};
  return Nothing{};
}

// ---------------------------------------------------------------------------
// parseDate / parseDateTime

namespace detail {

// Days since 1970-01-01 of a proleptic Gregorian date.
inline long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const long long yoe = y - era * 400;
  const long long doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const long long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

inline CivilDate civil_from_days(long long z) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const long long doe = z - era * 146097;
  const long long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long long y = yoe + era * 400;
  const long long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long long mp = (5 * doy + 2) / 153;
  const long long d = doy - (153 * mp + 2) / 5 + 1;
  const long long m = mp + (mp < 10 ? 3 : -9);
  return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

}  // namespace detail

// Spreadsheet serial date: day 1 is 1900-01-01 and day 60 is the fictitious
// 1900-02-29, so later serials are offset by one. The fractional part is the
// time of day, rounded to whole seconds.
inline std::optional<std::pair<CivilDate, TimeOfDay>> serial_to_datetime(double serial) {
  if (!std::isfinite(serial) || serial < 1.0 || serial >= 2958466.0) return std::nullopt;
  const long long total = std::llround(serial * 86400.0);
  const long long days = total / 86400;
  const long long secs = total % 86400;
  if (days == 60) return std::nullopt;
  static const long long base_early = detail::days_from_civil(1899, 12, 31);
  static const long long base_late = detail::days_from_civil(1899, 12, 30);
  CivilDate date = detail::civil_from_days((days < 60 ? base_early : base_late) + days);
  TimeOfDay time{static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60)};
  return std::make_pair(date, time);
}

inline FnValue parse_date(const CellValue& input, const DateGrammar& grammar = DateGrammar::standard()) {
  if (const auto* n = std::get_if<Numeric>(&input)) {
    auto dt = serial_to_datetime(n->value);
    if (!dt) return Nothing{};
    return LiteralValue{to_xsd_date(dt->first), xsd::kDate};
  }
  auto m = grammar.find(detail::text_of(input));
  if (!m) return Nothing{};
  return LiteralValue{to_xsd_date(m->value.date), xsd::kDate};
}

inline FnValue parse_datetime(const CellValue& input, const DateGrammar& grammar = DateGrammar::standard()) {
  if (const auto* n = std::get_if<Numeric>(&input)) {
    auto dt = serial_to_datetime(n->value);
    if (!dt) return Nothing{};
    return LiteralValue{to_xsd_datetime(dt->first, dt->second), xsd::kDateTime};
  }
  auto m = grammar.find(detail::text_of(input));
  if (!m || !m->value.time) return Nothing{};
  return LiteralValue{to_xsd_datetime(m->value.date, *m->value.time), xsd::kDateTime};
}

// ---------------------------------------------------------------------------
// entityLinking

inline std::vector<FnValue> entity_linking(std::string_view text, const CompiledGazetteer& gazetteer) {
  std::vector<FnValue> out;
  for (std::string& iri : gazetteer.link(text)) out.emplace_back(ResourceValue{std::move(iri)});
  return out;
}

// ---------------------------------------------------------------------------
// Formatted text extraction

// Which runs of a fragment an extraction function selects.
struct RunSelector {
  enum class Mode { Tag, Color, Unformatted, Exact } mode = Mode::Unformatted;
  std::string tag;    // b, i, u or strike
  std::string color;  // #rrggbb, lowercase
  std::string key;    // exact format key

  bool operator()(const Formatting& f) const {
    switch (mode) {
      case Mode::Tag:
        return (tag == "b" && f.bold) || (tag == "i" && f.italic) || (tag == "u" && f.underline) ||
               (tag == "strike" && f.strike);
      case Mode::Color: return f.colored() && f.color == color;
      case Mode::Unformatted: return f.plain();
      case Mode::Exact: return format_key(f) == key;
    }
    return false;
  }
};

namespace detail {

// Whitespace and list punctuation around an extracted span.
inline std::string_view trim_span(std::string_view s) {
  auto junk = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';'; };
  while (!s.empty() && junk(s.front())) s.remove_prefix(1);
  while (!s.empty() && junk(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Maximal stretches of consecutive selected runs, trimmed of whitespace and
// ',' ';', empty ones dropped. Nested tags are transparent: <b>a<i>b</i></b>
// selected by tag b is "ab".
inline std::vector<std::string> extract_spans(std::string_view html, const RunSelector& selector) {
  std::vector<std::string> spans;
  std::string current;
  bool open = false;
  auto close = [&] {
    std::string_view t = detail::trim_span(current);
    if (open && !t.empty()) spans.emplace_back(t);
    current.clear();
    open = false;
  };
  for (const TextRun& run : parse_fragment(html)) {
    if (selector(run.format)) {
      current += run.text;
      open = true;
    } else {
      close();
    }
  }
  close();
  return spans;
}

inline RunSelector selector_for(const FunctionCall& call) {
  RunSelector s;
  if (auto key = call.get(param::kFormatKey)) {
    s.mode = RunSelector::Mode::Exact;
    s.key = format_key(parse_format_key(*key));
    return s;
  }
  switch (call.function) {
    case FunctionId::GetEntitiesByTag:
      s.mode = RunSelector::Mode::Tag;
      s.tag = call.get(param::kTag).value_or("");
      if (s.tag != "b" && s.tag != "i" && s.tag != "u" && s.tag != "strike")
        throw Error("getEntitiesByTag: tag must be b, i, u or strike, got '" + s.tag + "'");
      break;
    case FunctionId::GetEntitiesByColor:
      s.mode = RunSelector::Mode::Color;
      s.color = detail::lower(call.get(param::kColorHex).value_or(""));
      if (!detail::is_hex_color(s.color)) throw Error("getEntitiesByColor: colorHex must be #rrggbb");
      break;
    case FunctionId::GetEntitiesByUnformatted: s.mode = RunSelector::Mode::Unformatted; break;
    default: throw Error("not an extraction function: " + std::string(function_name(call.function)));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Dispatch

inline std::string rich_html_of(const CellValue& v) {
  if (const auto* r = std::get_if<RichText>(&v)) return r->html;
  return escape_html(str(v));
}

inline std::vector<FnValue> apply(const FunctionCall& call, const CellValue& input, const FunctionContext& ctx);

namespace detail {

inline std::vector<FnValue> single(FnValue v) {
  std::vector<FnValue> out;
  if (!is_nothing(v)) out.push_back(std::move(v));
  return out;
}

inline char decimal_point_of(const FunctionCall& call) {
  std::string p = call.get(param::kDecimalPoint).value_or(".");
  if (p != "." && p != ",") throw Error("parseNumber: decimalPoint must be '.' or ','");
  return p[0];
}

}  // namespace detail

// Applies a function call to a cell value. Nothing results are dropped.
inline std::vector<FnValue> apply(const FunctionCall& call, const CellValue& input, const FunctionContext& ctx) {
  if (is_blank(input)) return {};
  switch (call.function) {
    case FunctionId::ParseNumber: {
      char point = detail::decimal_point_of(call);
      bool integer_only = call.flag(param::kIntegerOnly);
      if (call.flag(param::kAllMatches)) return parse_numbers(input, point, integer_only);
      return detail::single(parse_number(input, point, integer_only));
    }
    case FunctionId::ParseBoolean: {
      auto t = call.params.contains(param::kTrueList) ? call.get_list(param::kTrueList) : default_true_lexicon();
      auto f = call.params.contains(param::kFalseList) ? call.get_list(param::kFalseList) : default_false_lexicon();
      return detail::single(parse_boolean(input, t, f));
    }
    case FunctionId::ParseDate: return detail::single(parse_date(input, *ctx.grammar));
    case FunctionId::ParseDateTime: return detail::single(parse_datetime(input, *ctx.grammar));
    case FunctionId::EntityLinking: {
      std::string iri = call.get(param::kGazetteer).value_or("");
      const CompiledGazetteer* g = ctx.gazetteers ? ctx.gazetteers(iri) : nullptr;
      if (!g) throw ExecutionError("entityLinking: unknown gazetteer <" + iri + ">");
      if (!std::holds_alternative<Text>(input) && !std::holds_alternative<RichText>(input)) return {};
      return entity_linking(detail::text_of(input), *g);
    }
    case FunctionId::GetEntitiesByTag:
    case FunctionId::GetEntitiesByColor:
    case FunctionId::GetEntitiesByUnformatted: {
      std::vector<FnValue> out;
      for (std::string& span : extract_spans(rich_html_of(input), selector_for(call))) {
        if (!call.inner) {
          out.emplace_back(LiteralValue{std::move(span), xsd::kString});
          continue;
        }
        for (FnValue& v : apply(*call.inner, Text{span}, ctx)) out.push_back(std::move(v));
      }
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Accessors and object maps

// How an object map reads its cell (the part after the column letter in a
// reference such as "C.json").
enum class Accessor { Value, ValueString, ValueInt, ValueNumeric, ValueBoolean, ValueRichText, Json };

inline constexpr std::array<Accessor, 7> kAllAccessors{Accessor::Value,        Accessor::ValueString,
                                                       Accessor::ValueInt,     Accessor::ValueNumeric,
                                                       Accessor::ValueBoolean, Accessor::ValueRichText,
                                                       Accessor::Json};

inline std::string_view accessor_name(Accessor a) {
  switch (a) {
    case Accessor::Value: return "value";
    case Accessor::ValueString: return "valueString";
    case Accessor::ValueInt: return "valueInt";
    case Accessor::ValueNumeric: return "valueNumeric";
    case Accessor::ValueBoolean: return "valueBoolean";
    case Accessor::ValueRichText: return "valueRichText";
    case Accessor::Json: return "json";
  }
  return "";
}

inline std::optional<Accessor> accessor_from_name(std::string_view name) {
  for (Accessor a : kAllAccessors)
    if (accessor_name(a) == name) return a;
  return std::nullopt;
}

// The typed value an accessor projects out of a cell; nullopt on a kind
// mismatch. `json` hands over the full typed cell.
inline std::optional<CellValue> resolve_accessor(Accessor a, const CellValue& cell) {
  if (is_blank(cell)) return std::nullopt;
  switch (a) {
    case Accessor::Json: return cell;
    case Accessor::Value: return CellValue{Text{str(cell)}};
    case Accessor::ValueString:
      if (std::holds_alternative<Text>(cell) || std::holds_alternative<RichText>(cell))
        return CellValue{Text{str(cell)}};
      return std::nullopt;
    case Accessor::ValueInt:
      if (const auto* n = std::get_if<Numeric>(&cell); n && dp(n->value) == 0) return cell;
      return std::nullopt;
    case Accessor::ValueNumeric:
      if (std::holds_alternative<Numeric>(cell)) return cell;
      return std::nullopt;
    case Accessor::ValueBoolean:
      if (std::holds_alternative<Boolean>(cell)) return cell;
      return std::nullopt;
    case Accessor::ValueRichText: return CellValue{RichText{rich_html_of(cell)}};
  }
  return std::nullopt;
}

// Lexical form of a projected value used directly as a literal.
inline std::string accessor_lexical(Accessor a, const CellValue& projected) {
  switch (a) {
    case Accessor::ValueInt: return detail::integer_text(std::get<Numeric>(projected).value);
    case Accessor::ValueNumeric: return detail::shortest_fixed(std::get<Numeric>(projected).value);
    case Accessor::ValueRichText: return std::get<RichText>(projected).html;
    default: return str(projected);
  }
}

struct ObjectMap {
  Accessor reference = Accessor::Value;
  TermType term_type = TermType::Literal;
  std::string datatype;  // empty for IRIs
  std::optional<FunctionCall> function;

  friend bool operator==(const ObjectMap&, const ObjectMap&) = default;
};

// RDF object terms produced by an object map for one cell.
inline std::vector<FnValue> evaluate_object_map(const ObjectMap& map, const CellValue& cell,
                                                const FunctionContext& ctx) {
  std::vector<FnValue> out;
  auto projected = resolve_accessor(map.reference, cell);
  if (!projected) return out;
  if (!map.function) {
    std::string lexical = accessor_lexical(map.reference, *projected);
    if (map.term_type == TermType::Iri)
      out.emplace_back(ResourceValue{std::move(lexical)});
    else
      out.emplace_back(LiteralValue{std::move(lexical), map.datatype.empty() ? xsd::kString : map.datatype});
    return out;
  }
  for (FnValue& v : apply(*map.function, *projected, ctx)) {
    if (map.term_type == TermType::Iri) {
      if (std::holds_alternative<ResourceValue>(v)) out.push_back(std::move(v));
    } else if (auto* lit = std::get_if<LiteralValue>(&v)) {
      if (!map.datatype.empty()) lit->datatype = map.datatype;
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace tabrml
