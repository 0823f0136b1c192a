#pragma once

// RDF terms, N-Quads reading/writing and a Turtle reader for the subset the
// mapping writer produces (prefixes, blank node property lists, object
// lists, typed and language-tagged literals).

#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "tabrml/error.hpp"
#include "tabrml/html_fragment.hpp"

namespace tabrml {

inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfLangString = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

struct Term {
  enum class Kind { Iri, Blank, Literal };
  Kind kind = Kind::Iri;
  std::string value;     // IRI, blank node label or lexical form
  std::string datatype;  // literals only
  std::string language;  // literals only

  static Term iri(std::string v) { return {Kind::Iri, std::move(v), {}, {}}; }
  static Term blank(std::string label) { return {Kind::Blank, std::move(label), {}, {}}; }
  static Term literal(std::string lexical, std::string datatype = std::string(kXsdString)) {
    return {Kind::Literal, std::move(lexical), std::move(datatype), {}};
  }
  static Term lang_literal(std::string lexical, std::string language) {
    return {Kind::Literal, std::move(lexical), std::string(kRdfLangString), std::move(language)};
  }

  bool is_iri() const { return kind == Kind::Iri; }
  bool is_blank() const { return kind == Kind::Blank; }
  bool is_literal() const { return kind == Kind::Literal; }
  // IRIs and blank nodes.
  bool is_resource() const { return kind != Kind::Literal; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct Quad {
  Triple triple;
  std::optional<Term> graph;

  friend bool operator==(const Quad&, const Quad&) = default;
};

namespace detail {

inline std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string escape_iri(std::string_view s) {
  std::string out;
  static constexpr char hex[] = "0123456789ABCDEF";
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (c <= 0x20 || ch == '<' || ch == '>' || ch == '"' || ch == '{' || ch == '}' || ch == '|' || ch == '^' ||
        ch == '`' || ch == '\\') {
      out += "\\u00";
      out += hex[c >> 4];
      out += hex[c & 15];
    } else {
      out += ch;
    }
  }
  return out;
}

}  // namespace detail

// N-Triples/N-Quads rendering of a term. xsd:string literals are written as
// simple literals.
inline std::string to_ntriples(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Iri: return "<" + detail::escape_iri(t.value) + ">";
    case Term::Kind::Blank: return "_:" + t.value;
    case Term::Kind::Literal: {
      std::string out = "\"" + detail::escape_literal(t.value) + "\"";
      if (!t.language.empty()) return out + "@" + t.language;
      if (t.datatype.empty() || t.datatype == kXsdString) return out;
      return out + "^^<" + detail::escape_iri(t.datatype) + ">";
    }
  }
  return {};
}

inline std::string to_nquad(const Quad& q) {
  std::string out = to_ntriples(q.triple.subject) + " " + to_ntriples(q.triple.predicate) + " " +
                    to_ntriples(q.triple.object);
  if (q.graph) out += " " + to_ntriples(*q.graph);
  return out + " .\n";
}

namespace detail {

// Shared lexical machinery of the N-Quads and Turtle readers.
class RdfLexer {
 public:
  RdfLexer(std::string_view text, std::string what) : s_(text), what_(std::move(what)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what_ + ", line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  std::size_t pos() const { return pos_; }

  // Skips whitespace and comments; with `newlines` false stops at '\n'.
  void skip_ws(bool newlines = true) {
    while (!eof()) {
      char c = s_[pos_];
      if (c == '#') {
        while (!eof() && s_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  bool consume_word(std::string_view w) {
    if (s_.substr(pos_, w.size()) != w) return false;
    pos_ += w.size();
    return true;
  }

  std::uint32_t read_hex(std::size_t n) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char c = peek();
      int d = std::isdigit(static_cast<unsigned char>(c))   ? c - '0'
              : (c >= 'a' && c <= 'f')                       ? c - 'a' + 10
              : (c >= 'A' && c <= 'F')                       ? c - 'A' + 10
                                                             : -1;
      if (d < 0) fail("bad hex escape");
      v = v * 16 + static_cast<std::uint32_t>(d);
      ++pos_;
    }
    return v;
  }

  std::string read_iri_ref() {
    expect('<');
    std::string out;
    for (;;) {
      if (eof()) fail("unterminated IRI");
      char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        char k = s_[pos_++];
        if (k == 'u')
          append_utf8(out, read_hex(4));
        else if (k == 'U')
          append_utf8(out, read_hex(8));
        else
          fail("bad IRI escape");
        continue;
      }
      if (c == ' ' || c == '\n' || c == '<' || c == '"') fail("invalid character in IRI");
      out += c;
    }
    return out;
  }

  std::string read_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof()) fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\n') fail("newline in string");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      char k = s_[pos_++];
      switch (k) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'u': append_utf8(out, read_hex(4)); break;
        case 'U': append_utf8(out, read_hex(8)); break;
        default: fail(std::string("bad string escape \\") + k);
      }
    }
    return out;
  }

  std::string read_blank_label() {
    if (!consume_word("_:")) fail("expected blank node");
    std::string out;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                      (peek() == '.' && pos_ + 1 < s_.size() &&
                       std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))))
      out += s_[pos_++];
    if (out.empty()) fail("empty blank node label");
    return out;
  }

  std::string read_language() {
    std::string out;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) out += s_[pos_++];
    if (out.empty()) fail("empty language tag");
    return out;
  }

 protected:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace detail

// Reads an N-Quads (or N-Triples) document.
inline std::vector<Quad> parse_nquads(std::string_view text) {
  struct Reader : detail::RdfLexer {
    using RdfLexer::RdfLexer;

    Term term(bool allow_literal) {
      char c = peek();
      if (c == '<') return Term::iri(read_iri_ref());
      if (c == '_') return Term::blank(read_blank_label());
      if (c == '"' && allow_literal) {
        std::string lex = read_string();
        if (consume('@')) return Term::lang_literal(std::move(lex), read_language());
        if (consume_word("^^")) return Term::literal(std::move(lex), read_iri_ref());
        return Term::literal(std::move(lex));
      }
      fail("expected a term");
    }
  } r(text, "N-Quads");

  std::vector<Quad> out;
  for (;;) {
    r.skip_ws();
    if (r.eof()) break;
    Quad q;
    q.triple.subject = r.term(false);
    r.skip_ws(false);
    q.triple.predicate = r.term(false);
    if (!q.triple.predicate.is_iri()) r.fail("predicate must be an IRI");
    r.skip_ws(false);
    q.triple.object = r.term(true);
    r.skip_ws(false);
    if (r.peek() != '.') q.graph = r.term(false);
    r.skip_ws(false);
    r.expect('.');
    r.skip_ws(false);
    if (!r.eof() && r.peek() != '\n') r.fail("trailing content after statement");
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Turtle

struct TurtleDocument {
  std::vector<std::pair<std::string, std::string>> prefixes;  // in declaration order
  std::vector<Triple> triples;                                // in document order

  // Objects of (subject, predicate) in document order.
  std::vector<Term> objects(const Term& subject, std::string_view predicate) const {
    std::vector<Term> out;
    for (const Triple& t : triples)
      if (t.subject == subject && t.predicate.is_iri() && t.predicate.value == predicate) out.push_back(t.object);
    return out;
  }

  std::vector<Term> subjects(std::string_view predicate, const Term& object) const {
    std::vector<Term> out;
    for (const Triple& t : triples)
      if (t.predicate.value == predicate && t.object == object) out.push_back(t.subject);
    return out;
  }
};

namespace detail {

class TurtleReader : public RdfLexer {
 public:
  explicit TurtleReader(std::string_view text) : RdfLexer(text, "Turtle") {}

  TurtleDocument read() {
    for (;;) {
      skip_ws();
      if (eof()) break;
      if (peek() == '@' || starts_with_keyword("PREFIX") || starts_with_keyword("BASE")) {
        directive();
        continue;
      }
      Term subject = subject_term();
      skip_ws();
      if (!(subject.is_blank() && last_was_property_list_ && peek() == '.')) predicate_object_list(subject);
      skip_ws();
      expect('.');
    }
    return std::move(doc_);
  }

 private:
  bool starts_with_keyword(std::string_view kw) const {
    if (s_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(s_[pos_ + i])) != kw[i]) return false;
    return pos_ + kw.size() < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_ + kw.size()]));
  }

  void directive() {
    bool at = consume('@');
    if (at ? consume_word("prefix") : (starts_with_keyword("PREFIX") && (pos_ += 6, true))) {
      skip_ws();
      std::string name;
      while (!eof() && peek() != ':') {
        char c = peek();
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
          fail("bad prefix name");
        name += c;
        ++pos_;
      }
      expect(':');
      skip_ws();
      std::string iri = read_iri_ref();
      bool replaced = false;
      for (auto& [n, v] : doc_.prefixes)
        if (n == name) {
          v = iri;
          replaced = true;
        }
      if (!replaced) doc_.prefixes.emplace_back(name, iri);
      skip_ws();
      if (at) expect('.');
      return;
    }
    fail("unsupported directive");
  }

  std::string resolve_prefixed() {
    std::string prefix;
    while (!eof() && peek() != ':') {
      char c = peek();
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) fail("bad prefixed name");
      prefix += c;
      ++pos_;
    }
    expect(':');
    std::string local;
    for (;;) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
          static_cast<unsigned char>(c) >= 0x80) {
        local += c;
        ++pos_;
      } else if (c == '.' && (std::isalnum(static_cast<unsigned char>(peek(1))) || peek(1) == '_')) {
        local += c;
        ++pos_;
      } else if (c == '%') {
        local += c;
        ++pos_;
        local += peek();
        ++pos_;
        local += peek();
        ++pos_;
      } else if (c == '\\' && peek(1) != '\0') {
        local += peek(1);
        pos_ += 2;
      } else {
        break;
      }
    }
    for (const auto& [n, v] : doc_.prefixes)
      if (n == prefix) return v + local;
    fail("undeclared prefix '" + prefix + "'");
  }

  Term iri_term() {
    if (peek() == '<') return Term::iri(read_iri_ref());
    return Term::iri(resolve_prefixed());
  }

  Term fresh_blank() { return Term::blank("b" + std::to_string(blank_counter_++)); }

  Term blank_label_term() {
    std::string label = read_blank_label();
    auto [it, inserted] = labels_.emplace(label, Term{});
    if (inserted) it->second = fresh_blank();
    return it->second;
  }

  Term subject_term() {
    last_was_property_list_ = false;
    char c = peek();
    if (c == '[') {
      last_was_property_list_ = true;
      return property_list();
    }
    if (c == '_') return blank_label_term();
    if (c == '(') fail("collections are not supported");
    return iri_term();
  }

  Term property_list() {
    expect('[');
    Term node = fresh_blank();
    skip_ws();
    if (consume(']')) return node;
    predicate_object_list(node);
    skip_ws();
    expect(']');
    return node;
  }

  void predicate_object_list(const Term& subject) {
    for (;;) {
      skip_ws();
      Term predicate;
      if (peek() == 'a' && (std::isspace(static_cast<unsigned char>(peek(1))) || peek(1) == '<')) {
        ++pos_;
        predicate = Term::iri(std::string(kRdfType));
      } else {
        predicate = iri_term();
      }
      for (;;) {
        skip_ws();
        Term object = object_term();
        doc_.triples.push_back({subject, predicate, std::move(object)});
        skip_ws();
        if (!consume(',')) break;
      }
      skip_ws();
      if (!consume(';')) return;
      skip_ws();
      while (consume(';')) skip_ws();
      if (peek() == '.' || peek() == ']') return;
    }
  }

  Term object_term() {
    char c = peek();
    if (c == '[') return property_list();
    if (c == '_') return blank_label_term();
    if (c == '"') {
      std::string lex = read_string();
      if (consume('@')) return Term::lang_literal(std::move(lex), read_language());
      if (consume_word("^^")) return Term::literal(std::move(lex), iri_term().value);
      return Term::literal(std::move(lex));
    }
    if (c == '(') fail("collections are not supported");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') return number();
    if (consume_word("true")) return Term::literal("true", "http://www.w3.org/2001/XMLSchema#boolean");
    if (consume_word("false")) return Term::literal("false", "http://www.w3.org/2001/XMLSchema#boolean");
    return iri_term();
  }

  Term number() {
    std::string lex;
    if (peek() == '-' || peek() == '+') lex += s_[pos_++];
    bool dot = false;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                      (!dot && peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))))) {
      dot = dot || peek() == '.';
      lex += s_[pos_++];
    }
    if (lex.empty() || lex == "-" || lex == "+") fail("bad number");
    return Term::literal(lex, dot ? "http://www.w3.org/2001/XMLSchema#decimal"
                                  : "http://www.w3.org/2001/XMLSchema#integer");
  }

  TurtleDocument doc_;
  std::map<std::string, Term> labels_;
  std::size_t blank_counter_ = 0;
  bool last_was_property_list_ = false;
};

}  // namespace detail

// Parses Turtle into triples. Triples sharing a subject keep their document
// order; a triple whose object is a "[ ... ]" list follows the list's own
// triples.
inline TurtleDocument parse_turtle(std::string_view text) { return detail::TurtleReader(text).read(); }

}  // namespace tabrml
