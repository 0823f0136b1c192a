#pragma once

// Rich text cells are stored as small HTML fragments. Only five elements are
// allowed: b, i, u, strike and font (with a single color="#rrggbb"
// attribute). This header parses such fragments into formatted text runs and
// renders runs back into fragments.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tabrml/error.hpp"

namespace tabrml {

struct Formatting {
  bool bold = false;
  bool italic = false;
  bool underline = false;
  bool strike = false;
  // Lowercase "#rrggbb", empty for the default text color.
  std::string color;

  bool emphasized() const { return bold || italic || underline || strike; }
  // Black is the default text color and does not count as coloring.
  bool colored() const { return !color.empty() && color != "#000000"; }
  bool plain() const { return !emphasized() && !colored(); }

  friend bool operator==(const Formatting&, const Formatting&) = default;
};

struct TextRun {
  std::string text;
  Formatting format;

  friend bool operator==(const TextRun&, const TextRun&) = default;
};

// Canonical name of a formatting combination, e.g. "b", "b+i",
// "b+color:#ff0000", "color:#0000ff" or "unformatted". Emphasis tags appear in
// the fixed order b, i, u, strike.
inline std::string format_key(const Formatting& f) {
  std::string key;
  auto add = [&key](std::string_view part) {
    if (!key.empty()) key += '+';
    key += part;
  };
  if (f.bold) add("b");
  if (f.italic) add("i");
  if (f.underline) add("u");
  if (f.strike) add("strike");
  if (f.colored()) add("color:" + f.color);
  return key.empty() ? std::string("unformatted") : key;
}

// Inverse of format_key; throws HtmlError on unknown parts.
inline Formatting parse_format_key(std::string_view key) {
  Formatting f;
  if (key == "unformatted") return f;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    std::size_t end = key.find('+', pos);
    if (end == std::string_view::npos) end = key.size();
    std::string_view part = key.substr(pos, end - pos);
    if (part == "b") {
      f.bold = true;
    } else if (part == "i") {
      f.italic = true;
    } else if (part == "u") {
      f.underline = true;
    } else if (part == "strike") {
      f.strike = true;
    } else if (part.starts_with("color:#") && part.size() == 13) {
      f.color = std::string(part.substr(6));
      for (char& c : f.color) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      throw HtmlError("unknown format key part '" + std::string(part) + "'");
    }
    pos = end + 1;
  }
  return f;
}

inline std::string escape_html(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline bool is_hex_color(std::string_view v) {
  if (v.size() != 7 || v[0] != '#') return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!std::isxdigit(static_cast<unsigned char>(v[i]))) return false;
  return true;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class FragmentParser {
 public:
  explicit FragmentParser(std::string_view html) : html_(html) {}

  std::vector<TextRun> parse() {
    std::vector<Frame> stack;
    Formatting current;
    std::string text;
    auto flush = [&] {
      if (text.empty()) return;
      if (!runs_.empty() && runs_.back().format == current)
        runs_.back().text += text;
      else
        runs_.push_back({std::move(text), current});
      text.clear();
    };

    while (pos_ < html_.size()) {
      char c = html_[pos_];
      if (c == '<') {
        flush();
        parse_tag(stack, current);
      } else if (c == '&') {
        text += parse_entity();
      } else {
        text += c;
        ++pos_;
      }
    }
    flush();
    if (!stack.empty()) fail("unclosed <" + stack.back().name + ">");
    return std::move(runs_);
  }

 private:
  struct Frame {
    std::string name;
    Formatting saved;
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw HtmlError("malformed rich text at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_spaces() {
    while (pos_ < html_.size() && std::isspace(static_cast<unsigned char>(html_[pos_]))) ++pos_;
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < html_.size() && std::isalpha(static_cast<unsigned char>(html_[pos_]))) ++pos_;
    if (start == pos_) fail("expected tag name");
    return lower(html_.substr(start, pos_ - start));
  }

  void expect(char c) {
    if (pos_ >= html_.size() || html_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void parse_tag(std::vector<Frame>& stack, Formatting& current) {
    ++pos_;  // '<'
    bool closing = pos_ < html_.size() && html_[pos_] == '/';
    if (closing) ++pos_;
    std::string name = read_name();
    if (name != "b" && name != "i" && name != "u" && name != "strike" && name != "font")
      fail("tag <" + name + "> is not allowed");

    if (closing) {
      skip_spaces();
      expect('>');
      if (stack.empty() || stack.back().name != name) fail("unexpected </" + name + ">");
      current = stack.back().saved;
      stack.pop_back();
      return;
    }

    Frame frame{name, current};
    std::string color;
    for (;;) {
      skip_spaces();
      if (pos_ >= html_.size()) fail("unterminated tag");
      if (html_[pos_] == '>') break;
      std::string attr = read_name();
      skip_spaces();
      expect('=');
      skip_spaces();
      if (pos_ >= html_.size() || (html_[pos_] != '"' && html_[pos_] != '\'')) fail("expected quoted attribute value");
      char quote = html_[pos_++];
      std::size_t end = html_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      std::string value(html_.substr(pos_, end - pos_));
      pos_ = end + 1;
      if (name != "font" || attr != "color" || !color.empty()) fail("attribute '" + attr + "' is not allowed");
      if (!is_hex_color(value)) fail("color must be #rrggbb, got '" + value + "'");
      color = lower(value);
    }
    ++pos_;  // '>'

    if (name == "b") current.bold = true;
    else if (name == "i") current.italic = true;
    else if (name == "u") current.underline = true;
    else if (name == "strike") current.strike = true;
    else {
      if (color.empty()) fail("<font> requires a color attribute");
      current.color = color;
    }
    stack.push_back(std::move(frame));
  }

  std::string parse_entity() {
    std::size_t end = html_.find(';', pos_);
    if (end == std::string_view::npos || end - pos_ > 10) fail("bare '&'");
    std::string_view name = html_.substr(pos_ + 1, end - pos_ - 1);
    std::string out;
    if (name == "amp") out = "&";
    else if (name == "lt") out = "<";
    else if (name == "gt") out = ">";
    else if (name == "quot") out = "\"";
    else if (name == "apos") out = "'";
    else if (name.size() > 1 && name[0] == '#') {
      bool hex = name[1] == 'x' || name[1] == 'X';
      std::string_view digits = name.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      std::uint32_t cp = 0;
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') v = d - '0';
        else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
        else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      append_utf8(out, cp);
    } else {
      fail("unknown entity '&" + std::string(name) + ";'");
    }
    pos_ = end + 1;
    return out;
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::vector<TextRun> runs_;
};

}  // namespace detail

// Parses a rich text fragment into runs. Adjacent runs with identical
// formatting are merged. Throws HtmlError if the fragment is not well formed.
inline std::vector<TextRun> parse_fragment(std::string_view html) {
  return detail::FragmentParser(html).parse();
}

inline std::string strip_tags(std::string_view html) {
  std::string out;
  for (const TextRun& run : parse_fragment(html)) out += run.text;
  return out;
}

// Renders runs as a fragment. Tags nest in the fixed order
// font > b > i > u > strike; plain runs are emitted as bare text.
inline std::string render_fragment(const std::vector<TextRun>& runs) {
  std::string out;
  for (const TextRun& run : runs) {
    const Formatting& f = run.format;
    if (f.colored()) out += "<font color=\"" + f.color + "\">";
    if (f.bold) out += "<b>";
    if (f.italic) out += "<i>";
    if (f.underline) out += "<u>";
    if (f.strike) out += "<strike>";
    out += escape_html(run.text);
    if (f.strike) out += "</strike>";
    if (f.underline) out += "</u>";
    if (f.italic) out += "</i>";
    if (f.bold) out += "</b>";
    if (f.colored()) out += "</font>";
  }
  return out;
}

}  // namespace tabrml
