#pragma once

// Mapping documents: emission from prediction trees, Turtle reading and
// writing, execution over sheets and N-Quads output with cell provenance.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tabrml/aho_corasick.hpp"
#include "tabrml/cell_model.hpp"
#include "tabrml/error.hpp"
#include "tabrml/fno.hpp"
#include "tabrml/rdf.hpp"
#include "tabrml/templates.hpp"

namespace tabrml {

namespace vocab {
inline constexpr std::string_view kRr = "http://www.w3.org/ns/r2rml#";
inline constexpr std::string_view kRml = "http://semweb.mmlab.be/ns/rml#";
inline constexpr std::string_view kQl = "http://semweb.mmlab.be/ns/ql#";
inline constexpr std::string_view kFnml = "http://semweb.mmlab.be/ns/fnml#";
inline constexpr std::string_view kFno = "https://w3id.org/function/ontology#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";

inline std::string rr(std::string_view local) { return std::string(kRr) + std::string(local); }
inline std::string rml(std::string_view local) { return std::string(kRml) + std::string(local); }
inline std::string fnml(std::string_view local) { return std::string(kFnml) + std::string(local); }
inline std::string fno(std::string_view local) { return std::string(kFno) + std::string(local); }
}  // namespace vocab

struct Namespaces {
  std::string entity = "http://example.org/entity/";
  std::string property = "http://example.org/property/";
  std::string function = "http://example.org/function#";
  std::string mapping = "http://example.org/mapping#";

  friend bool operator==(const Namespaces&, const Namespaces&) = default;
};

struct PredicateObjectMap {
  std::string predicate;
  std::uint32_t column = 0;
  ObjectMap object_map;

  friend bool operator==(const PredicateObjectMap&, const PredicateObjectMap&) = default;
};

struct TriplesMap {
  std::string iri;
  std::string sheet;
  std::string subject_template;  // "{row}" is the 1-based spreadsheet row
  std::vector<PredicateObjectMap> poms;

  friend bool operator==(const TriplesMap&, const TriplesMap&) = default;
};

struct MappingDocument {
  Namespaces namespaces;
  std::vector<TriplesMap> maps;
  // Entity dictionaries referenced by entityLinking calls, keyed by IRI.
  std::vector<std::pair<std::string, Gazetteer>> gazetteers;

  const Gazetteer* gazetteer(std::string_view iri) const {
    for (const auto& [k, g] : gazetteers)
      if (k == iri) return &g;
    return nullptr;
  }

  friend bool operator==(const MappingDocument&, const MappingDocument&) = default;
};

inline std::string reference_string(std::uint32_t column, Accessor accessor) {
  return column_letter(column) + "." + std::string(accessor_name(accessor));
}

inline std::pair<std::uint32_t, Accessor> parse_reference(std::string_view ref) {
  auto dot = ref.find('.');
  std::optional<std::uint32_t> column;
  std::optional<Accessor> accessor;
  if (dot != std::string_view::npos) {
    column = parse_column_letter(ref.substr(0, dot));
    accessor = accessor_from_name(ref.substr(dot + 1));
  }
  if (!column || !accessor) throw ParseError("bad reference \"" + std::string(ref) + "\", expected {column}.{accessor}");
  return {*column, *accessor};
}

// Lowercase ASCII, runs of anything else collapsed to '_'.
inline std::string slugify(std::string_view text) {
  std::string out;
  bool gap = false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      if (gap && !out.empty()) out += '_';
      out += static_cast<char>(std::tolower(c));
      gap = false;
    } else {
      gap = true;
    }
  }
  return out;
}

inline std::string format_suffix(std::string_view format_key) {
  if (format_key == "unformatted") return "_plain";
  std::string out = "_";
  for (char c : format_key) {
    if (c == '+' || c == ':')
      out += '_';
    else if (c != '#')
      out += c;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

class NameAllocator {
 public:
  std::string take(const std::string& base) {
    std::string name = base;
    for (int k = 2; used_.contains(name); ++k) name = base + "_" + std::to_string(k);
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
};

inline void collect_preorder(const std::vector<PredictionNode>& nodes, std::vector<const PredictionNode*>& out) {
  for (const PredictionNode& n : nodes) {
    out.push_back(&n);
    collect_preorder(n.children, out);
  }
}

}  // namespace detail

inline MappingDocument emit_mapping(const Table& table, const std::vector<ColumnPrediction>& predictions,
                                    const Namespaces& ns = {}) {
  MappingDocument doc;
  doc.namespaces = ns;
  TriplesMap tm;
  std::string sheet_slug = slugify(table.sheet.name());
  tm.iri = ns.mapping + "TriplesMap_" + (sheet_slug.empty() ? "sheet" : sheet_slug);
  tm.sheet = table.sheet.name();
  tm.subject_template = ns.entity + "row_{row}";

  detail::NameAllocator predicates;
  detail::NameAllocator gazetteer_names;

  auto attach_gazetteer = [&](const TemplateScore& chosen, FunctionCall& call, const std::string& slug) {
    if (!chosen.gazetteer) return;
    std::string iri = ns.mapping + gazetteer_names.take("gazetteer_" + slug);
    call.set(param::kGazetteer, iri);
    doc.gazetteers.emplace_back(iri, *chosen.gazetteer);
  };

  for (const ColumnPrediction& p : predictions) {
    std::string base = slugify(p.header);
    if (base.empty()) base = "column_" + column_letter(p.column);
    std::string slug = predicates.take(base);

    if (!p.formatted) {
      std::vector<const PredictionNode*> nodes;
      detail::collect_preorder(p.tree.roots, nodes);
      for (const PredictionNode* node : nodes) {
        PredicateObjectMap pom{ns.property + slug, p.column, node->chosen.object_map};
        if (pom.object_map.function) attach_gazetteer(node->chosen, *pom.object_map.function, slug);
        tm.poms.push_back(std::move(pom));
      }
      continue;
    }
    for (const FormattedGroup& g : p.groups) {
      std::string group_slug = predicates.take(slug + format_suffix(g.column.format_key));
      std::vector<const PredictionNode*> nodes;
      detail::collect_preorder(g.tree.roots, nodes);
      for (const PredictionNode* node : nodes) {
        const ObjectMap& child = node->chosen.object_map;
        PredicateObjectMap pom;
        pom.predicate = ns.property + group_slug;
        pom.column = p.column;
        pom.object_map.reference = Accessor::ValueRichText;
        pom.object_map.term_type = child.term_type;
        pom.object_map.datatype = child.datatype;
        FunctionCall call = g.column.extraction;
        if (child.function) {
          FunctionCall inner = *child.function;
          attach_gazetteer(node->chosen, inner, group_slug);
          call.set(param::kInnerTermType, child.term_type == TermType::Iri ? "IRI" : "Literal");
          if (!child.datatype.empty()) call.set(param::kInnerDatatype, child.datatype);
          call.inner = std::make_shared<const FunctionCall>(std::move(inner));
        }
        pom.object_map.function = std::move(call);
        tm.poms.push_back(std::move(pom));
      }
    }
  }
  doc.maps.push_back(std::move(tm));
  return doc;
}

// ---------------------------------------------------------------------------
// Turtle writing

namespace detail {

class TurtleWriter {
 public:
  explicit TurtleWriter(std::vector<std::pair<std::string, std::string>> prefixes) : prefixes_(std::move(prefixes)) {}

  std::string prefix_block() const {
    std::string out;
    for (const auto& [name, iri] : prefixes_) out += "@prefix " + name + ": <" + escape_iri(iri) + "> .\n";
    return out;
  }

  std::string iri(std::string_view value) const {
    std::string best;
    std::size_t best_len = 0;
    for (const auto& [name, ns] : prefixes_) {
      if (ns.size() <= best_len || !value.starts_with(ns)) continue;
      std::string_view local = value.substr(ns.size());
      if (!valid_local(local)) continue;
      best = name + ":" + std::string(local);
      best_len = ns.size();
    }
    if (!best.empty()) return best;
    return "<" + escape_iri(value) + ">";
  }

  static std::string literal(std::string_view lexical) { return "\"" + escape_literal(lexical) + "\""; }

 private:
  static bool valid_local(std::string_view s) {
    if (s.empty() || s.front() == '-') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
  }

  std::vector<std::pair<std::string, std::string>> prefixes_;
};

inline std::vector<std::pair<std::string, std::string>> mapping_prefixes(const Namespaces& ns) {
  return {{"rr", std::string(vocab::kRr)},     {"rml", std::string(vocab::kRml)},
          {"ql", std::string(vocab::kQl)},     {"fnml", std::string(vocab::kFnml)},
          {"fno", std::string(vocab::kFno)},   {"xsd", std::string(vocab::kXsd)},
          {"fn", ns.function},                 {"prop", ns.property},
          {"ent", ns.entity},                  {"map", ns.mapping}};
}

inline std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

// "[" block with one property per entry, closed at `depth`.
inline std::string block(const std::vector<std::string>& props, int depth) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < props.size(); ++i)
    out += indent(depth + 1) + props[i] + (i + 1 < props.size() ? " ;\n" : "\n");
  return out + indent(depth) + "]";
}

inline std::string function_block(const TurtleWriter& w, const Namespaces& ns, const FunctionCall& call,
                                  std::optional<std::string> input, int depth) {
  std::vector<std::string> poms;
  auto pom = [&](const std::string& predicate, const std::string& object_map) {
    poms.push_back("rr:predicateObjectMap " +
                   block({"rr:predicate " + predicate, "rr:objectMap " + object_map}, depth + 1));
  };
  pom("fno:executes", "[ rr:constant " + w.iri(ns.function + std::string(function_name(call.function))) + " ]");
  if (input) pom(w.iri(ns.function + "input"), "[ rml:reference " + TurtleWriter::literal(*input) + " ]");
  for (const auto& [name, values] : call.params) {
    if (values.empty()) continue;
    std::string objects;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) objects += ", ";
      objects += name == param::kGazetteer ? w.iri(values[i]) : TurtleWriter::literal(values[i]);
    }
    pom(w.iri(ns.function + name), "[ rr:constant " + objects + " ]");
  }
  if (call.inner) {
    std::string inner = function_block(w, ns, *call.inner, std::nullopt, depth + 3);
    pom(w.iri(ns.function + "inner"), block({"fnml:functionValue " + inner}, depth + 2));
  }
  return block(poms, depth);
}

}  // namespace detail

inline std::string serialize_turtle(const MappingDocument& doc) {
  const Namespaces& ns = doc.namespaces;
  detail::TurtleWriter w(detail::mapping_prefixes(ns));
  std::string out = w.prefix_block();
  for (const TriplesMap& tm : doc.maps) {
    out += "\n" + w.iri(tm.iri) + " a rr:TriplesMap ;\n";
    std::vector<std::string> props;
    props.push_back("rml:logicalSource " + detail::block({"rml:source " + detail::TurtleWriter::literal(tm.sheet),
                                                          "rml:referenceFormulation ql:Spreadsheet",
                                                          "rml:iterator \"row\""},
                                                         1));
    props.push_back("rr:subjectMap " +
                    detail::block({"rr:template " + detail::TurtleWriter::literal(tm.subject_template)}, 1));
    for (const PredicateObjectMap& pom : tm.poms) {
      const ObjectMap& om = pom.object_map;
      std::vector<std::string> om_props;
      std::string ref = reference_string(pom.column, om.reference);
      if (om.function)
        om_props.push_back("fnml:functionValue " + detail::function_block(w, ns, *om.function, ref, 3));
      else
        om_props.push_back("rml:reference " + detail::TurtleWriter::literal(ref));
      om_props.push_back(std::string("rr:termType ") + (om.term_type == TermType::Iri ? "rr:IRI" : "rr:Literal"));
      if (!om.datatype.empty()) om_props.push_back("rr:datatype " + w.iri(om.datatype));
      props.push_back("rr:predicateObjectMap " +
                      detail::block({"rr:predicate " + w.iri(pom.predicate), "rr:objectMap " + detail::block(om_props, 2)},
                                    1));
    }
    for (std::size_t i = 0; i < props.size(); ++i) out += "  " + props[i] + (i + 1 < props.size() ? " ;\n" : " .\n");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Turtle reading

namespace detail {

class MappingReader {
 public:
  explicit MappingReader(const TurtleDocument& doc) : doc_(doc) {
    for (const auto& [name, iri] : doc.prefixes) {
      if (name == "fn") ns_.function = iri;
      if (name == "prop") ns_.property = iri;
      if (name == "ent") ns_.entity = iri;
      if (name == "map") ns_.mapping = iri;
    }
  }

  MappingDocument read() {
    MappingDocument out;
    out.namespaces = ns_;
    for (const Term& subject : doc_.subjects(kRdfType, Term::iri(vocab::rr("TriplesMap")))) {
      TriplesMap tm;
      tm.iri = subject.value;
      const Term source = one(subject, vocab::rml("logicalSource"), "rml:logicalSource");
      tm.sheet = literal(one(source, vocab::rml("source"), "rml:source"), "rml:source");
      const Term subject_map = one(subject, vocab::rr("subjectMap"), "rr:subjectMap");
      tm.subject_template = literal(one(subject_map, vocab::rr("template"), "rr:template"), "rr:template");
      for (const Term& pom_node : doc_.objects(subject, vocab::rr("predicateObjectMap"))) {
        PredicateObjectMap pom;
        pom.predicate = iri(one(pom_node, vocab::rr("predicate"), "rr:predicate"), "rr:predicate");
        const Term om = one(pom_node, vocab::rr("objectMap"), "rr:objectMap");
        std::optional<std::string> ref;
        auto fn = doc_.objects(om, vocab::fnml("functionValue"));
        if (!fn.empty()) {
          pom.object_map.function = function(fn.front(), &ref);
        } else {
          ref = literal(one(om, vocab::rml("reference"), "rml:reference"), "rml:reference");
        }
        if (!ref) fail("object map of <" + pom.predicate + "> has no input reference");
        auto [column, accessor] = parse_reference(*ref);
        pom.column = column;
        pom.object_map.reference = accessor;
        auto tt = doc_.objects(om, vocab::rr("termType"));
        pom.object_map.term_type =
            !tt.empty() && tt.front().value == vocab::rr("IRI") ? TermType::Iri : TermType::Literal;
        auto dt = doc_.objects(om, vocab::rr("datatype"));
        if (!dt.empty()) pom.object_map.datatype = iri(dt.front(), "rr:datatype");
        tm.poms.push_back(std::move(pom));
      }
      out.maps.push_back(std::move(tm));
    }
    return out;
  }

 private:
  [[noreturn]] static void fail(const std::string& msg) { throw ParseError("mapping: " + msg); }

  Term one(const Term& subject, const std::string& predicate, std::string_view what) const {
    auto objs = doc_.objects(subject, predicate);
    if (objs.size() != 1) fail("expected exactly one " + std::string(what));
    return objs.front();
  }

  static std::string literal(const Term& t, std::string_view what) {
    if (!t.is_literal()) fail(std::string(what) + " must be a literal");
    return t.value;
  }

  static std::string iri(const Term& t, std::string_view what) {
    if (!t.is_iri()) fail(std::string(what) + " must be an IRI");
    return t.value;
  }

  std::string function_local(const std::string& iri_value) const {
    if (!iri_value.starts_with(ns_.function)) fail("<" + iri_value + "> is outside the function namespace");
    return iri_value.substr(ns_.function.size());
  }

  FunctionCall function(const Term& node, std::optional<std::string>* input) const {
    FunctionCall call;
    bool executes = false;
    for (const Term& pom : doc_.objects(node, vocab::rr("predicateObjectMap"))) {
      std::string predicate = iri(one(pom, vocab::rr("predicate"), "rr:predicate"), "rr:predicate");
      const Term om = one(pom, vocab::rr("objectMap"), "rr:objectMap");
      if (predicate == vocab::fno("executes")) {
        std::string name = function_local(iri(one(om, vocab::rr("constant"), "rr:constant"), "fno:executes"));
        auto id = function_from_name(name);
        if (!id) fail("unknown function " + name);
        call.function = *id;
        executes = true;
        continue;
      }
      std::string name = function_local(predicate);
      if (name == "input") {
        if (!input) fail("nested function calls take no input");
        *input = literal(one(om, vocab::rml("reference"), "rml:reference"), "fn:input");
      } else if (name == "inner") {
        call.inner = std::make_shared<const FunctionCall>(
            function(one(om, vocab::fnml("functionValue"), "fnml:functionValue"), nullptr));
      } else {
        std::vector<std::string> values;
        for (const Term& v : doc_.objects(om, vocab::rr("constant"))) values.push_back(v.value);
        if (values.empty()) fail("parameter " + name + " has no value");
        call.params[name] = std::move(values);
      }
    }
    if (!executes) fail("function call without fno:executes");
    return call;
  }

  const TurtleDocument& doc_;
  Namespaces ns_;
};

}  // namespace detail

// Reads a mapping written by serialize_turtle (gazetteers travel separately,
// see parse_entities).
inline MappingDocument parse_mapping(std::string_view turtle) {
  TurtleDocument doc = parse_turtle(turtle);
  return detail::MappingReader(doc).read();
}

// Entity label graph of every gazetteer: each entity with its labels and the
// dictionaries it belongs to.
inline std::string serialize_entities(const MappingDocument& doc) {
  detail::TurtleWriter w({{"rdfs", std::string(vocab::kRdfs)},
                          {"fn", doc.namespaces.function},
                          {"ent", doc.namespaces.entity},
                          {"map", doc.namespaces.mapping}});
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> entities;
  auto add_unique = [](std::vector<std::string>& v, const std::string& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& [gaz, g] : doc.gazetteers) {
    for (const auto& [label, iri] : g.entries) {
      auto [it, inserted] = entities.try_emplace(iri);
      if (inserted) order.push_back(iri);
      add_unique(it->second.first, label);
      add_unique(it->second.second, gaz);
    }
  }
  std::string out = w.prefix_block();
  for (const std::string& iri : order) {
    const auto& [labels, gazetteers] = entities[iri];
    out += "\n" + w.iri(iri) + " rdfs:label ";
    for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", " : "") + detail::TurtleWriter::literal(labels[i]);
    out += " ;\n  fn:gazetteer ";
    for (std::size_t i = 0; i < gazetteers.size(); ++i) out += (i ? ", " : "") + w.iri(gazetteers[i]);
    out += " .\n";
  }
  return out;
}

inline std::vector<std::pair<std::string, Gazetteer>> parse_entities(std::string_view turtle) {
  TurtleDocument doc = parse_turtle(turtle);
  std::string function_ns = Namespaces{}.function;
  for (const auto& [name, iri] : doc.prefixes)
    if (name == "fn") function_ns = iri;
  const std::string label = std::string(vocab::kRdfs) + "label";
  const std::string member = function_ns + "gazetteer";

  std::vector<std::pair<std::string, Gazetteer>> out;
  auto slot = [&out](const std::string& iri) -> Gazetteer& {
    for (auto& [k, g] : out)
      if (k == iri) return g;
    out.emplace_back(iri, Gazetteer{});
    return out.back().second;
  };
  std::vector<Term> seen;
  for (const Triple& t : doc.triples) {
    if (t.predicate.value != member) continue;
    if (!t.object.is_iri() || !t.subject.is_iri()) throw ParseError("entities: fn:gazetteer needs IRIs");
    Gazetteer& g = slot(t.object.value);
    for (const Term& l : doc.objects(t.subject, label)) {
      if (!l.is_literal()) throw ParseError("entities: rdfs:label must be a literal");
      g.entries.emplace_back(l.value, t.subject.value);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution

struct ProvenancedStatement {
  Triple triple;
  std::string sheet;
  std::uint32_t column = 0;
  std::uint32_t row = 0;

  friend bool operator==(const ProvenancedStatement&, const ProvenancedStatement&) = default;
};

inline std::string expand_subject(std::string_view tmpl, std::uint32_t row) {
  std::string out(tmpl);
  const std::string key = "{row}";
  const std::string number = std::to_string(row + 1);
  for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + number.size()))
    out.replace(pos, key.size(), number);
  return out;
}

inline Term to_term(const FnValue& v) {
  if (const auto* r = std::get_if<ResourceValue>(&v)) return Term::iri(r->iri);
  const auto& l = std::get<LiteralValue>(v);
  return Term::literal(l.lexical, l.datatype.empty() ? std::string(kXsdString) : l.datatype);
}

namespace detail {

inline bool same_extraction(const FunctionCall& a, const FunctionCall& b) {
  return a.function == b.function && a.get(param::kTag) == b.get(param::kTag) &&
         a.get(param::kColorHex) == b.get(param::kColorHex) && a.get(param::kFormatKey) == b.get(param::kFormatKey);
}

// Values of one extracted span under an extraction object map.
inline std::vector<FnValue> span_values(const ObjectMap& map, const std::string& span, const FunctionContext& ctx) {
  ObjectMap inner_map;
  inner_map.reference = Accessor::Json;
  inner_map.term_type = map.term_type;
  inner_map.datatype = map.datatype;
  if (map.function->inner) inner_map.function = *map.function->inner;
  return evaluate_object_map(inner_map, Text{span}, ctx);
}

}  // namespace detail

// Runs every triples map over its sheet. Object maps sharing a predicate and
// a column form a chain: for each cell the first map that yields anything
// wins, and for chains of one extraction function this applies per span.
inline std::vector<ProvenancedStatement> execute(const MappingDocument& doc, const std::vector<Sheet>& sheets,
                                                 const DateGrammar& grammar = DateGrammar::standard()) {
  std::map<std::string, CompiledGazetteer, std::less<>> compiled;
  for (const auto& [iri, g] : doc.gazetteers) compiled.emplace(iri, CompiledGazetteer(g));
  FunctionContext ctx;
  ctx.grammar = &grammar;
  ctx.gazetteers = [&compiled](std::string_view iri) -> const CompiledGazetteer* {
    auto it = compiled.find(iri);
    return it == compiled.end() ? nullptr : &it->second;
  };

  std::vector<ProvenancedStatement> out;
  for (const TriplesMap& tm : doc.maps) {
    auto sheet_it = std::find_if(sheets.begin(), sheets.end(), [&](const Sheet& s) { return s.name() == tm.sheet; });
    if (sheet_it == sheets.end())
      throw ExecutionError("triples map <" + tm.iri + ">: no sheet named '" + tm.sheet + "'");
    const Sheet& sheet = *sheet_it;

    std::vector<std::vector<const PredicateObjectMap*>> chains;
    for (const PredicateObjectMap& pom : tm.poms) {
      if (pom.column >= sheet.width())
        throw ExecutionError("triples map <" + tm.iri + ">, map for <" + pom.predicate + ">: column " +
                             column_letter(pom.column) + " is not in sheet '" + tm.sheet + "'");
      auto it = std::find_if(chains.begin(), chains.end(), [&](const auto& c) {
        return c.front()->predicate == pom.predicate && c.front()->column == pom.column;
      });
      if (it == chains.end())
        chains.push_back({&pom});
      else
        it->push_back(&pom);
    }
    if (sheet.empty()) continue;
    const Table table = extract_table(sheet);

    for (std::uint32_t row : table.entity_rows) {
      const Term subject = Term::iri(expand_subject(tm.subject_template, row));
      for (const auto& chain : chains) {
        const PredicateObjectMap& head = *chain.front();
        const CellValue& cell = sheet.at(head.column, row);
        if (is_blank(cell)) continue;
        const Term predicate = Term::iri(head.predicate);
        std::vector<FnValue> values;
        try {
          bool per_span = std::all_of(chain.begin(), chain.end(), [&](const PredicateObjectMap* p) {
            return p->object_map.reference == Accessor::ValueRichText && p->object_map.function &&
                   is_extraction(p->object_map.function->function) &&
                   detail::same_extraction(*p->object_map.function, *head.object_map.function);
          });
          if (per_span) {
            auto projected = resolve_accessor(Accessor::ValueRichText, cell);
            for (const std::string& span :
                 extract_spans(std::get<RichText>(*projected).html, selector_for(*head.object_map.function))) {
              for (const PredicateObjectMap* p : chain) {
                auto v = detail::span_values(p->object_map, span, ctx);
                if (v.empty()) continue;
                values.insert(values.end(), v.begin(), v.end());
                break;
              }
            }
          } else {
            for (const PredicateObjectMap* p : chain) {
              values = evaluate_object_map(p->object_map, cell, ctx);
              if (!values.empty()) break;
            }
          }
        } catch (const ExecutionError&) {
          throw;
        } catch (const Error& e) {
          throw ExecutionError("triples map <" + tm.iri + ">, map for <" + head.predicate + ">, cell " +
                               column_letter(head.column) + std::to_string(row + 1) + ": " + e.what());
        }
        std::vector<Triple> emitted;
        for (const FnValue& v : values) {
          Triple t{subject, predicate, to_term(v)};
          if (std::find(emitted.begin(), emitted.end(), t) != emitted.end()) continue;
          emitted.push_back(t);
          out.push_back({std::move(t), tm.sheet, head.column, row});
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// N-Quads with provenance

inline std::string cell_graph_iri(std::string_view sheet, std::uint32_t column, std::uint32_t row) {
  return "urn:cell:" + detail::percent_encode(sheet) + ":" + column_letter(column) + std::to_string(row + 1);
}

namespace detail {

inline std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace detail

struct CellRef {
  std::string sheet;
  std::uint32_t column = 0;
  std::uint32_t row = 0;
};

inline CellRef parse_cell_graph_iri(std::string_view iri) {
  constexpr std::string_view prefix = "urn:cell:";
  auto bad = [&] { return ParseError("not a cell provenance graph: <" + std::string(iri) + ">"); };
  if (!iri.starts_with(prefix)) throw bad();
  std::string_view rest = iri.substr(prefix.size());
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) throw bad();
  std::string_view coord = rest.substr(colon + 1);
  std::size_t split = 0;
  while (split < coord.size() && coord[split] >= 'A' && coord[split] <= 'Z') ++split;
  auto column = parse_column_letter(coord.substr(0, split));
  std::string_view digits = coord.substr(split);
  if (!column || digits.empty() || digits.size() > 9 || digits.front() == '0' ||
      !std::all_of(digits.begin(), digits.end(), detail::is_digit))
    throw bad();
  return {detail::percent_decode(rest.substr(0, colon)), *column,
          static_cast<std::uint32_t>(std::stoul(std::string(digits)) - 1)};
}

inline std::string serialize_nquads(const std::vector<ProvenancedStatement>& statements) {
  std::string out;
  for (const ProvenancedStatement& s : statements)
    out += to_nquad({s.triple, Term::iri(cell_graph_iri(s.sheet, s.column, s.row))});
  return out;
}

inline std::vector<ProvenancedStatement> parse_provenanced_nquads(std::string_view text) {
  std::vector<ProvenancedStatement> out;
  for (Quad& q : parse_nquads(text)) {
    if (!q.graph || !q.graph->is_iri()) throw ParseError("N-Quads statement without a cell provenance graph");
    CellRef ref = parse_cell_graph_iri(q.graph->value);
    out.push_back({std::move(q.triple), std::move(ref.sheet), ref.column, ref.row});
  }
  return out;
}

}  // namespace tabrml
