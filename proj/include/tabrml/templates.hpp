#pragma once

// Object map templates, their heuristics and the per-column prediction tree.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tabrml/aho_corasick.hpp"
#include "tabrml/cell_model.hpp"
#include "tabrml/error.hpp"
#include "tabrml/fno.hpp"
#include "tabrml/html_fragment.hpp"
#include "tabrml/predicates.hpp"

namespace tabrml {

enum class TemplateId {
  FormattedText,
  IntegerAsString,
  DecimalAsStringPoint,
  DecimalAsStringComma,
  DateAsString,
  DateTimeAsString,
  IntegerListAsString,
  BooleanAsString,
  String,
  SingleEntity,
  MultipleEntities,
  NativeBoolean,
  NativeInteger,
  NativeDecimal,
  NumericWithDataFormat,
};

struct TemplateSpec {
  TemplateId id;
  std::string_view name;
  std::optional<int> rank;  // FormattedText has none
  Accessor reference;
  TermType term_type;
  std::string_view datatype;  // empty: IRI or child dependent
  std::optional<FunctionId> function;
};

inline const std::array<TemplateSpec, 15>& template_table() {
  using F = FunctionId;
  using T = TemplateId;
  static const std::array<TemplateSpec, 15> table{{
      {T::FormattedText, "FormattedText", std::nullopt, Accessor::ValueRichText, TermType::Literal, "",
       F::GetEntitiesByTag},
      {T::IntegerAsString, "IntegerAsString", 2, Accessor::Json, TermType::Literal, xsd::kInteger, F::ParseNumber},
      {T::DecimalAsStringPoint, "DecimalAsStringPoint", 1, Accessor::Json, TermType::Literal, xsd::kDecimal,
       F::ParseNumber},
      {T::DecimalAsStringComma, "DecimalAsStringComma", 1, Accessor::Json, TermType::Literal, xsd::kDecimal,
       F::ParseNumber},
      {T::DateAsString, "DateAsString", 2, Accessor::Json, TermType::Literal, xsd::kDate, F::ParseDate},
      {T::DateTimeAsString, "DateTimeAsString", 3, Accessor::Json, TermType::Literal, xsd::kDateTime,
       F::ParseDateTime},
      {T::IntegerListAsString, "IntegerListAsString", 0, Accessor::Json, TermType::Literal, xsd::kInteger,
       F::ParseNumber},
      {T::BooleanAsString, "BooleanAsString", 4, Accessor::Json, TermType::Literal, xsd::kBoolean, F::ParseBoolean},
      {T::String, "String", 0, Accessor::Value, TermType::Literal, xsd::kString, std::nullopt},
      {T::SingleEntity, "SingleEntity", 3, Accessor::ValueString, TermType::Iri, "", F::EntityLinking},
      {T::MultipleEntities, "MultipleEntities", 4, Accessor::ValueString, TermType::Iri, "", F::EntityLinking},
      {T::NativeBoolean, "NativeBoolean", 0, Accessor::ValueBoolean, TermType::Literal, xsd::kBoolean, std::nullopt},
      {T::NativeInteger, "NativeInteger", 3, Accessor::ValueInt, TermType::Literal, xsd::kInteger, std::nullopt},
      {T::NativeDecimal, "NativeDecimal", 4, Accessor::ValueNumeric, TermType::Literal, xsd::kDecimal, std::nullopt},
      {T::NumericWithDataFormat, "NumericWithDataFormat", 5, Accessor::Json, TermType::Literal, xsd::kDate,
       F::ParseDate},
  }};
  return table;
}

inline const TemplateSpec& spec_of(TemplateId id) { return template_table()[static_cast<std::size_t>(id)]; }

inline std::string_view template_name(TemplateId id) { return spec_of(id).name; }

inline std::optional<TemplateId> template_from_name(std::string_view name) {
  for (const TemplateSpec& s : template_table())
    if (s.name == name) return s.id;
  return std::nullopt;
}

struct PredictionOptions {
  double bool_length_threshold = 3.5;
  // Treat text-only multi-section number formats as boolean displays.
  bool boolean_display = true;
  std::vector<std::string> true_lexicon = default_true_lexicon();
  std::vector<std::string> false_lexicon = default_false_lexicon();
  std::string entity_namespace = "http://example.org/entity/";
  const DateGrammar* grammar = &DateGrammar::standard();
};

struct TemplateScore {
  TemplateId id = TemplateId::String;
  double score = 0.0;
  ObjectMap object_map;
  std::optional<DataFormatType> delta;  // NumericWithDataFormat only
  std::optional<Gazetteer> gazetteer;   // entity templates only

  int rank() const { return spec_of(id).rank.value_or(-1); }
  bool has_function() const { return object_map.function.has_value(); }
};

namespace detail {

inline std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += ch;
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline double ratio(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace detail

inline std::string entity_iri(std::string_view entity_namespace, std::string_view label) {
  return std::string(entity_namespace) + detail::percent_encode(detail::lower_ascii(label));
}

// Distinct labels become entities, in order of first occurrence.
inline Gazetteer build_gazetteer(const std::vector<std::string>& labels, std::string_view entity_namespace) {
  Gazetteer g;
  std::unordered_set<std::string> seen;
  for (const std::string& raw : labels) {
    std::string label(detail::trim(raw));
    if (label.empty() || !seen.insert(detail::lower_ascii(label)).second) continue;
    g.entries.emplace_back(label, entity_iri(entity_namespace, label));
  }
  return g;
}

// Splits the distinct string tokens of a boolean-like column into true and
// false lists. Lexicon words go to their side; unknown tokens, most frequent
// first, fill an empty side opposite a filled one, or the true side when both
// are still empty.
inline std::pair<std::vector<std::string>, std::vector<std::string>> vote_boolean_lexicons(
    const std::vector<Cell>& strings, const std::vector<std::string>& true_lexicon,
    const std::vector<std::string>& false_lexicon) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> freq;
  for (const Cell& c : strings) {
    std::string token = normalize_token(str(c.value));
    if (token.empty()) continue;
    if (freq[token]++ == 0) order.push_back(token);
  }
  auto in = [](const std::vector<std::string>& lexicon, const std::string& token) {
    return std::any_of(lexicon.begin(), lexicon.end(),
                       [&](const std::string& w) { return normalize_token(w) == token; });
  };
  std::vector<std::string> yes, no, unknown;
  for (const std::string& t : order) {
    if (in(true_lexicon, t))
      yes.push_back(t);
    else if (in(false_lexicon, t))
      no.push_back(t);
    else
      unknown.push_back(t);
  }
  std::stable_sort(unknown.begin(), unknown.end(),
                   [&](const std::string& a, const std::string& b) { return freq[a] > freq[b]; });
  for (const std::string& t : unknown) {
    if (yes.empty() && !no.empty())
      yes.push_back(t);
    else if (no.empty() && !yes.empty())
      no.push_back(t);
    else if (yes.empty() && no.empty())
      yes.push_back(t);
  }
  return {yes, no};
}

// Scores every template except FormattedText against a column.
inline std::vector<TemplateScore> score_all(const ColumnPartition& column, const PredictionOptions& options = {}) {
  if (column.empty()) throw Error("score_all: column has no non-blank cells");
  const DateGrammar& grammar = *options.grammar;
  const std::size_t n = column.size();

  std::size_t s_int = 0, s_dec_point = 0, s_dec_comma = 0, s_date = 0, s_datetime = 0;
  std::vector<std::string> s_values;
  for (const Cell& c : column.strings) {
    std::string v = str(c.value);
    s_int += is_int(v);
    s_dec_point += is_dec(v, '.');
    s_dec_comma += is_dec(v, ',');
    s_date += grammar.is_date(v);
    s_datetime += grammar.is_datetime(v);
    s_values.push_back(std::move(v));
  }
  std::size_t n_int = 0, n_dec = 0;
  std::map<DataFormatType, std::size_t> by_format;
  for (const Cell& c : column.numerics) {
    (dp(std::get<Numeric>(c.value).value) == 0 ? n_int : n_dec)++;
    DataFormatType t = df(c.value);
    if (t == DataFormatType::Date || t == DataFormatType::DateTime ||
        (t == DataFormatType::BooleanDisplay && options.boolean_display))
      ++by_format[t];
  }
  std::size_t hat_int = 0;
  for (const std::string& s : column.substrings) hat_int += is_int(s);

  std::vector<TemplateScore> out;
  auto add = [&](TemplateId id, double score) -> TemplateScore& {
    const TemplateSpec& spec = spec_of(id);
    TemplateScore t;
    t.id = id;
    t.score = score;
    t.object_map.reference = spec.reference;
    t.object_map.term_type = spec.term_type;
    t.object_map.datatype = std::string(spec.datatype);
    if (spec.function) t.object_map.function = FunctionCall(*spec.function);
    out.push_back(std::move(t));
    return out.back();
  };

  add(TemplateId::IntegerAsString, detail::ratio(s_int + n_int, n)).object_map.function->set(param::kIntegerOnly, "true");
  add(TemplateId::DecimalAsStringPoint, detail::ratio(s_dec_point + n_dec, n))
      .object_map.function->set(param::kDecimalPoint, ".");
  add(TemplateId::DecimalAsStringComma, detail::ratio(s_dec_comma + n_dec, n))
      .object_map.function->set(param::kDecimalPoint, ",");
  add(TemplateId::DateAsString, detail::ratio(s_date + column.numerics.size(), n));
  add(TemplateId::DateTimeAsString, detail::ratio(s_datetime + column.numerics.size(), n));
  {
    FunctionCall& f = *add(TemplateId::IntegerListAsString, detail::ratio(hat_int, column.substrings.size()))
                           .object_map.function;
    f.set(param::kIntegerOnly, "true");
    f.set(param::kAllMatches, "true");
  }
  {
    // At most two distinct strings whose mean length stays below the
    // threshold; the score is the share of string cells.
    std::vector<std::string> distinct;
    for (const std::string& v : s_values)
      if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    double mean = 0.0;
    for (const std::string& v : distinct) {
      std::size_t cps = 0;
      for (std::size_t i = 0; i < v.size();) {
        std::uint32_t cp = 0;
        i += detail::utf8_decode(v, i, cp);
        ++cps;
      }
      mean += static_cast<double>(cps);
    }
    if (!distinct.empty()) mean /= static_cast<double>(distinct.size());
    bool eligible = !distinct.empty() && distinct.size() <= 2 && mean < options.bool_length_threshold;
    TemplateScore& t = add(TemplateId::BooleanAsString, eligible ? detail::ratio(column.strings.size(), n) : 0.0);
    auto [yes, no] = vote_boolean_lexicons(column.strings, options.true_lexicon, options.false_lexicon);
    t.object_map.function->set_list(param::kTrueList, yes.empty() ? options.true_lexicon : yes);
    t.object_map.function->set_list(param::kFalseList, no.empty() ? options.false_lexicon : no);
  }
  const double d = dup(column.cells);
  add(TemplateId::String, 1.0 - d);
  add(TemplateId::SingleEntity, d).gazetteer = build_gazetteer(s_values, options.entity_namespace);
  add(TemplateId::MultipleEntities,
      dup_multiset(column.substrings, column.numerics.size() + column.booleans.size()))
      .gazetteer = build_gazetteer(column.substrings, options.entity_namespace);
  add(TemplateId::NativeBoolean, detail::ratio(column.booleans.size(), n));
  add(TemplateId::NativeInteger, detail::ratio(n_int, n));
  add(TemplateId::NativeDecimal, detail::ratio(n_dec, n));
  {
    // Best data format type; earlier types win ties.
    DataFormatType best = DataFormatType::Date;
    std::size_t count = 0;
    for (DataFormatType t : {DataFormatType::Date, DataFormatType::DateTime, DataFormatType::BooleanDisplay}) {
      auto it = by_format.find(t);
      if (it != by_format.end() && it->second > count) {
        best = t;
        count = it->second;
      }
    }
    TemplateScore& t = add(TemplateId::NumericWithDataFormat, detail::ratio(count, n));
    t.delta = best;
    if (best == DataFormatType::DateTime) {
      t.object_map.datatype = xsd::kDateTime;
      t.object_map.function = FunctionCall(FunctionId::ParseDateTime);
    } else if (best == DataFormatType::BooleanDisplay) {
      t.object_map.datatype = xsd::kBoolean;
      t.object_map.function = FunctionCall(FunctionId::ParseBoolean);
    }
  }
  return out;
}

inline constexpr double kScoreEpsilon = 1e-9;

// Strict preference: higher score, then higher rank, then no function, then
// declaration order.
inline bool preferred(const TemplateScore& a, const TemplateScore& b) {
  if (std::fabs(a.score - b.score) > kScoreEpsilon) return a.score > b.score;
  if (a.rank() != b.rank()) return a.rank() > b.rank();
  if (a.has_function() != b.has_function()) return !a.has_function();
  return static_cast<int>(a.id) < static_cast<int>(b.id);
}

// Candidates in selection order, zero scores dropped.
inline std::vector<TemplateScore> rank_candidates(std::vector<TemplateScore> scores) {
  std::erase_if(scores, [](const TemplateScore& s) { return s.score <= kScoreEpsilon; });
  std::stable_sort(scores.begin(), scores.end(), preferred);
  return scores;
}

// The winning template, or nullopt when every score is zero.
inline std::optional<TemplateScore> select(const std::vector<TemplateScore>& scores) {
  std::vector<TemplateScore> ranked = rank_candidates(scores);
  if (ranked.empty()) return std::nullopt;
  return ranked.front();
}

// A function context whose gazetteer resolver answers with the template's
// own column-derived gazetteer.
class ScoreContext {
 public:
  ScoreContext(const TemplateScore& score, const PredictionOptions& options) {
    if (score.gazetteer) compiled_ = CompiledGazetteer(*score.gazetteer);
    ctx_.grammar = options.grammar;
    ctx_.gazetteers = [this](std::string_view) { return &compiled_; };
  }
  ScoreContext(const ScoreContext&) = delete;
  ScoreContext& operator=(const ScoreContext&) = delete;

  const FunctionContext& get() const { return ctx_; }

 private:
  CompiledGazetteer compiled_;
  FunctionContext ctx_;
};

struct PredictionNode {
  TemplateScore chosen;
  std::vector<Cell> covered;
  std::vector<PredictionNode> children;
};

struct PredictionTree {
  std::vector<PredictionNode> roots;
  std::vector<Cell> residue;  // cells no template could cover

  bool empty() const { return roots.empty() && residue.empty(); }
};

// Picks the best template that covers at least one cell and recurses on the
// cells it leaves uncovered.
inline PredictionTree predict_column(const std::vector<Cell>& cells, const PredictionOptions& options = {}) {
  PredictionTree tree;
  std::vector<Cell> pending;
  for (const Cell& c : cells)
    if (!is_blank(c.value)) pending.push_back(c);
  if (pending.empty()) return tree;

  for (TemplateScore& candidate : rank_candidates(score_all(partition(pending), options))) {
    ScoreContext ctx(candidate, options);
    PredictionNode node;
    std::vector<Cell> residual;
    for (const Cell& c : pending) {
      if (!evaluate_object_map(candidate.object_map, c.value, ctx.get()).empty())
        node.covered.push_back(c);
      else
        residual.push_back(c);
    }
    if (node.covered.empty()) continue;
    node.chosen = std::move(candidate);
    PredictionTree rest = predict_column(residual, options);
    node.children = std::move(rest.roots);
    tree.roots.push_back(std::move(node));
    tree.residue = std::move(rest.residue);
    return tree;
  }
  tree.residue = std::move(pending);
  return tree;
}

// Text spans of one formatting combination, as pseudo-cells at the
// coordinates of the cells they come from.
struct VirtualColumn {
  std::uint32_t source_column = 0;
  std::string format_key;
  FunctionCall extraction;
  std::vector<Cell> cells;
};

// Extraction function for a formatting group: emphasis first, then color,
// then unformatted. The exact key keeps groups disjoint.
inline FunctionCall extraction_for(std::string_view key) {
  Formatting f = parse_format_key(key);
  FunctionCall call;
  if (f.emphasized()) {
    call.function = FunctionId::GetEntitiesByTag;
    call.set(param::kTag, f.bold ? "b" : f.italic ? "i" : f.underline ? "u" : "strike");
  } else if (f.colored()) {
    call.function = FunctionId::GetEntitiesByColor;
    call.set(param::kColorHex, f.color);
  } else {
    call.function = FunctionId::GetEntitiesByUnformatted;
  }
  if (!f.plain()) call.set(param::kFormatKey, format_key(f));
  return call;
}

// One virtual column per formatting combination present in the column, in
// order of first appearance. Groups without any text span are dropped.
inline std::vector<VirtualColumn> expand_formatted(const std::vector<Cell>& cells) {
  std::vector<VirtualColumn> groups;
  std::map<std::string, std::size_t> index;
  for (const Cell& c : cells) {
    if (is_blank(c.value)) continue;
    std::vector<std::string> keys;
    for (const TextRun& run : parse_fragment(rich_html_of(c.value))) {
      std::string key = format_key(run.format);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const std::string& key : keys) {
      auto [it, inserted] = index.emplace(key, groups.size());
      if (inserted) {
        VirtualColumn g;
        g.source_column = c.column;
        g.format_key = key;
        g.extraction = extraction_for(key);
        groups.push_back(std::move(g));
      }
      VirtualColumn& g = groups[it->second];
      for (std::string& span : extract_spans(rich_html_of(c.value), selector_for(g.extraction)))
        g.cells.push_back({c.column, c.row, Text{std::move(span)}});
    }
  }
  std::erase_if(groups, [](const VirtualColumn& g) { return g.cells.empty(); });
  return groups;
}

struct FormattedGroup {
  VirtualColumn column;
  PredictionTree tree;
};

struct ColumnPrediction {
  std::uint32_t column = 0;
  std::string header;
  bool formatted = false;
  PredictionTree tree;                  // when !formatted
  std::vector<FormattedGroup> groups;  // when formatted
};

inline std::vector<Cell> column_cells(const Table& table, std::uint32_t column) {
  std::vector<Cell> out;
  for (std::uint32_t row : table.entity_rows) {
    const CellValue& v = table.sheet.at(column, row);
    if (!is_blank(v)) out.push_back({column, row, v});
  }
  return out;
}

inline ColumnPrediction predict_table_column(const Table& table, std::uint32_t column,
                                             const PredictionOptions& options = {}) {
  ColumnPrediction p;
  p.column = column;
  p.header = std::string(detail::trim(str(table.sheet.at(column, table.header_row))));
  std::vector<Cell> cells = column_cells(table, column);
  p.formatted = std::any_of(cells.begin(), cells.end(),
                            [](const Cell& c) { return std::holds_alternative<RichText>(c.value); });
  if (!p.formatted) {
    p.tree = predict_column(cells, options);
    return p;
  }
  for (VirtualColumn& g : expand_formatted(cells)) {
    PredictionTree tree = predict_column(g.cells, options);
    p.groups.push_back({std::move(g), std::move(tree)});
  }
  return p;
}

inline std::vector<ColumnPrediction> predict_table(const Table& table, const PredictionOptions& options = {}) {
  std::vector<ColumnPrediction> out;
  for (std::uint32_t column : table.columns) out.push_back(predict_table_column(table, column, options));
  return out;
}

// Human readable summary: one line per prediction node.
inline std::string prediction_report(const std::vector<ColumnPrediction>& predictions) {
  std::string out;
  auto line = [&out](const std::string& where, const PredictionNode& node, int depth) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", node.chosen.score);
    out += where + std::string(static_cast<std::size_t>(depth) * 2, ' ') + std::string(template_name(node.chosen.id));
    if (node.chosen.delta) out += "(" + std::string(to_string(*node.chosen.delta)) + ")";
    out += " score=" + std::string(buf) + " rank=" + std::to_string(node.chosen.rank()) +
           " covered=" + std::to_string(node.covered.size()) + "\n";
  };
  auto walk_tree = [&](const std::string& where, const PredictionTree& tree) {
    int depth = 0;
    std::vector<const PredictionNode*> chain;
    for (const PredictionNode& r : tree.roots) chain.push_back(&r);
    while (!chain.empty()) {
      std::vector<const PredictionNode*> next;
      for (const PredictionNode* n : chain) {
        line(where, *n, depth);
        for (const PredictionNode& c : n->children) next.push_back(&c);
      }
      chain = std::move(next);
      ++depth;
    }
    if (!tree.residue.empty()) out += where + "residue=" + std::to_string(tree.residue.size()) + "\n";
  };
  for (const ColumnPrediction& p : predictions) {
    std::string col = column_letter(p.column);
    std::string head = col + " \"" + p.header + "\"";
    if (!p.formatted) {
      walk_tree(head + ": ", p.tree);
      continue;
    }
    out += head + ": FormattedText groups=" + std::to_string(p.groups.size()) + "\n";
    for (const FormattedGroup& g : p.groups)
      walk_tree(col + "[" + g.column.format_key + "] " + std::string(function_name(g.column.extraction.function)) + ": ",
                g.tree);
  }
  return out;
}

}  // namespace tabrml
