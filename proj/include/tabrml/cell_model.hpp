#pragma once

// In-memory spreadsheet model and its canonical JSON interchange format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabrml/detail/numbers.hpp"
#include "tabrml/error.hpp"
#include "tabrml/html_fragment.hpp"

namespace tabrml {

struct Blank {
  friend bool operator==(const Blank&, const Blank&) = default;
};

struct Boolean {
  bool flag = false;
  friend bool operator==(const Boolean&, const Boolean&) = default;
};

struct Numeric {
  double value = 0.0;
  // Verbatim spreadsheet number format, e.g. "MM/DD/YYYY HH:MM AM/PM".
  std::optional<std::string> format;
  friend bool operator==(const Numeric&, const Numeric&) = default;
};

struct Text {
  std::string content;
  friend bool operator==(const Text&, const Text&) = default;
};

struct RichText {
  std::string html;
  friend bool operator==(const RichText&, const RichText&) = default;
};

using CellValue = std::variant<Blank, Boolean, Numeric, Text, RichText>;

enum class CellKind { Blank, Boolean, Numeric, Text, RichText };

inline CellKind kind_of(const CellValue& v) { return static_cast<CellKind>(v.index()); }

inline std::string_view kind_name(CellKind k) {
  switch (k) {
    case CellKind::Blank: return "blank";
    case CellKind::Boolean: return "boolean";
    case CellKind::Numeric: return "numeric";
    case CellKind::Text: return "text";
    case CellKind::RichText: return "richtext";
  }
  return "blank";
}

inline bool is_blank(const CellValue& v) { return std::holds_alternative<Blank>(v); }

struct Cell {
  std::uint32_t column = 0;
  std::uint32_t row = 0;
  CellValue value;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Spreadsheet column label: 0 -> "A", 25 -> "Z", 26 -> "AA".
inline std::string column_letter(std::uint32_t column) {
  std::string out;
  std::uint64_t n = std::uint64_t{column} + 1;
  while (n > 0) {
    --n;
    out.insert(out.begin(), static_cast<char>('A' + n % 26));
    n /= 26;
  }
  return out;
}

inline std::optional<std::uint32_t> parse_column_letter(std::string_view letters) {
  if (letters.empty() || letters.size() > 6) return std::nullopt;
  std::uint64_t n = 0;
  for (char c : letters) {
    if (c < 'A' || c > 'Z') return std::nullopt;
    n = n * 26 + static_cast<std::uint64_t>(c - 'A' + 1);
  }
  return static_cast<std::uint32_t>(n - 1);
}

// A rectangular grid of cells. Only non-blank cells are stored; every other
// coordinate inside width x height reads as Blank.
class Sheet {
 public:
  Sheet() = default;
  Sheet(std::string name, std::uint32_t width, std::uint32_t height)
      : name_(std::move(name)), width_(width), height_(height) {}

  const std::string& name() const { return name_; }
  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }

  void set(std::uint32_t column, std::uint32_t row, CellValue value) {
    if (column >= width_ || row >= height_)
      throw Error("cell " + column_letter(column) + std::to_string(row + 1) + " lies outside the " +
                  std::to_string(width_) + "x" + std::to_string(height_) + " sheet '" + name_ + "'");
    if (const auto* n = std::get_if<Numeric>(&value); n && !std::isfinite(n->value))
      throw Error("numeric cell values must be finite");
    if (const auto* r = std::get_if<RichText>(&value)) parse_fragment(r->html);
    if (is_blank(value))
      cells_.erase({row, column});
    else
      cells_[{row, column}] = std::move(value);
  }

  const CellValue& at(std::uint32_t column, std::uint32_t row) const {
    static const CellValue blank = Blank{};
    auto it = cells_.find({row, column});
    return it == cells_.end() ? blank : it->second;
  }

  // Non-blank cells, row-major.
  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    out.reserve(cells_.size());
    for (const auto& [key, value] : cells_) out.push_back({key.second, key.first, value});
    return out;
  }

  std::size_t cell_count() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  friend bool operator==(const Sheet&, const Sheet&) = default;

 private:
  std::string name_;
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, CellValue> cells_;  // (row, column)
};

// A table localized on a sheet: one header row followed by entity rows.
struct Table {
  Sheet sheet;
  std::uint32_t header_row = 0;
  std::vector<std::uint32_t> entity_rows;
  std::vector<std::uint32_t> columns;

  friend bool operator==(const Table&, const Table&) = default;
};

// Header = first non-blank row; entity rows = later rows with content;
// columns = every column holding at least one non-blank cell.
inline Table extract_table(const Sheet& sheet) {
  if (sheet.empty()) throw TableError("no table: sheet '" + sheet.name() + "' is blank");
  Table table;
  table.sheet = sheet;
  std::vector<Cell> cells = sheet.cells();
  table.header_row = cells.front().row;
  std::vector<std::uint32_t> columns;
  for (const Cell& c : cells) {
    if (c.row != table.header_row && (table.entity_rows.empty() || table.entity_rows.back() != c.row))
      table.entity_rows.push_back(c.row);
    columns.push_back(c.column);
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  table.columns = std::move(columns);
  return table;
}

namespace detail {

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

}  // namespace detail

inline Sheet parse_canonical(std::string_view document) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError("canonical sheet, line " + std::to_string(detail::line_of(document, e.byte == 0 ? 0 : e.byte - 1)) +
                     ": " + e.what());
  }

  auto fail = [](const std::string& field, const std::string& what) -> void {
    throw ParseError("canonical sheet, field '" + field + "': " + what);
  };
  if (!root.is_object()) fail("<root>", "expected an object");
  for (const auto& [key, _] : root.items())
    if (key != "name" && key != "width" && key != "height" && key != "cells") fail(key, "unknown field");

  auto require = [&](const json& obj, const std::string& key, const std::string& path) -> const json& {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing");
    return *it;
  };
  auto require_uint = [&](const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xFFFFFFFFu) fail(path, "expected a non-negative integer");
    return v.get<std::uint32_t>();
  };
  auto require_string = [&](const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  };

  Sheet sheet(require_string(root, "name", "name"), require_uint(root, "width", "width"),
              require_uint(root, "height", "height"));
  const json& cells = require(root, "cells", "cells");
  if (!cells.is_array()) fail("cells", "expected an array");

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const json& c = cells[i];
    const std::string at = "cells[" + std::to_string(i) + "]";
    if (!c.is_object()) fail(at, "expected an object");
    std::uint32_t col = require_uint(c, "col", at + ".col");
    std::uint32_t row = require_uint(c, "row", at + ".row");
    std::string kind = require_string(c, "kind", at + ".kind");

    std::vector<std::string> allowed{"col", "row", "kind"};
    CellValue value;
    if (kind == "blank") {
      value = Blank{};
    } else if (kind == "boolean") {
      const json& v = require(c, "value", at + ".value");
      if (!v.is_boolean()) fail(at + ".value", "expected a boolean");
      value = Boolean{v.get<bool>()};
      allowed.push_back("value");
    } else if (kind == "numeric") {
      const json& v = require(c, "value", at + ".value");
      if (!v.is_number()) fail(at + ".value", "expected a number");
      Numeric n{v.get<double>(), std::nullopt};
      if (c.contains("format")) n.format = require_string(c, "format", at + ".format");
      value = std::move(n);
      allowed.insert(allowed.end(), {"value", "format"});
    } else if (kind == "text") {
      value = Text{require_string(c, "text", at + ".text")};
      allowed.push_back("text");
    } else if (kind == "richtext") {
      value = RichText{require_string(c, "html", at + ".html")};
      allowed.push_back("html");
    } else {
      fail(at + ".kind", "unknown cell kind '" + kind + "'");
    }
    for (const auto& [key, _] : c.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(at + "." + key, "not allowed for kind '" + kind + "'");
    try {
      sheet.set(col, row, std::move(value));
    } catch (const Error& e) {
      fail(at, e.what());
    }
  }
  return sheet;
}

// Deterministic rendering: one cell per line, row-major, blank cells omitted.
inline std::string serialize_canonical(const Sheet& sheet) {
  using detail::json_string;
  std::string out = "{\n";
  out += "  \"name\": " + json_string(sheet.name()) + ",\n";
  out += "  \"width\": " + std::to_string(sheet.width()) + ",\n";
  out += "  \"height\": " + std::to_string(sheet.height()) + ",\n";
  std::vector<Cell> cells = sheet.cells();
  if (cells.empty()) {
    out += "  \"cells\": []\n}\n";
    return out;
  }
  out += "  \"cells\": [\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& c = cells[i];
    out += "    {\"col\": " + std::to_string(c.column) + ", \"row\": " + std::to_string(c.row) + ", \"kind\": \"";
    out += kind_name(kind_of(c.value));
    out += "\"";
    std::visit(
        [&out](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Boolean>) {
            out += std::string(", \"value\": ") + (v.flag ? "true" : "false");
          } else if constexpr (std::is_same_v<T, Numeric>) {
            out += ", \"value\": " + detail::shortest_repr(v.value);
            if (v.format) out += ", \"format\": " + json_string(*v.format);
          } else if constexpr (std::is_same_v<T, Text>) {
            out += ", \"text\": " + json_string(v.content);
          } else if constexpr (std::is_same_v<T, RichText>) {
            out += ", \"html\": " + json_string(v.html);
          }
        },
        c.value);
    out += i + 1 == cells.size() ? "}\n" : "},\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace tabrml
