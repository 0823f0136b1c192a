#pragma once

// XLSX ingestion into the cell model.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tabrml/cell_model.hpp"
#include "tabrml/detail/xml_dom.hpp"
#include "tabrml/detail/zip.hpp"
#include "tabrml/error.hpp"
#include "tabrml/html_fragment.hpp"

namespace tabrml {

struct Workbook {
  std::vector<Sheet> sheets;
  std::vector<std::string> warnings;

  const Sheet* find(std::string_view name) const {
    for (const Sheet& s : sheets)
      if (s.name() == name) return &s;
    return nullptr;
  }
};

// Formatting of the code points [start, end) of a cell text.
struct FormatRun {
  std::size_t start = 0;
  std::size_t end = 0;
  bool bold = false;
  bool italic = false;
  bool underline = false;
  bool strike = false;
  std::optional<std::string> color;  // "#rrggbb"

  Formatting formatting() const {
    Formatting f{bold, italic, underline, strike, color.value_or("")};
    return f;
  }
};

namespace detail {

// Byte offset of every code point boundary, plus the end.
inline std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < text.size(); ++i)
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) out.push_back(i);
  out.push_back(text.size());
  return out;
}

inline std::vector<TextRun> merge_runs(std::vector<TextRun> runs) {
  std::vector<TextRun> out;
  for (TextRun& r : runs) {
    if (r.text.empty()) continue;
    Formatting f = r.format;
    if (!f.colored()) f.color.clear();
    if (!out.empty() && out.back().format == f)
      out.back().text += r.text;
    else
      out.push_back({std::move(r.text), std::move(f)});
  }
  return out;
}

}  // namespace detail

// Offsets are in code points. Text outside every run is emitted unformatted.
inline std::string runs_to_html(std::string_view text, std::vector<FormatRun> runs) {
  auto offsets = detail::code_point_offsets(text);
  std::size_t length = offsets.size() - 1;
  std::sort(runs.begin(), runs.end(), [](const FormatRun& a, const FormatRun& b) { return a.start < b.start; });
  std::vector<TextRun> pieces;
  std::size_t cursor = 0;
  for (const FormatRun& r : runs) {
    if (r.start > r.end || r.end > length)
      throw IngestError("format run [" + std::to_string(r.start) + ", " + std::to_string(r.end) +
                        ") exceeds text of length " + std::to_string(length));
    if (r.start < cursor)
      throw IngestError("format runs overlap at offset " + std::to_string(r.start));
    if (r.start > cursor) pieces.push_back({std::string(text.substr(offsets[cursor], offsets[r.start] - offsets[cursor])), {}});
    pieces.push_back({std::string(text.substr(offsets[r.start], offsets[r.end] - offsets[r.start])), r.formatting()});
    cursor = r.end;
  }
  if (cursor < length) pieces.push_back({std::string(text.substr(offsets[cursor])), {}});
  return render_fragment(detail::merge_runs(std::move(pieces)));
}

namespace detail {

// Built-in number formats that are not "General".
inline const std::map<int, std::string>& builtin_number_formats() {
  static const std::map<int, std::string> table = {
      {1, "0"},
      {2, "0.00"},
      {3, "#,##0"},
      {4, "#,##0.00"},
      {9, "0%"},
      {10, "0.00%"},
      {11, "0.00E+00"},
      {12, "# ?/?"},
      {13, "# ?\?/?\?"},
      {14, "mm-dd-yy"},
      {15, "d-mmm-yy"},
      {16, "d-mmm"},
      {17, "mmm-yy"},
      {18, "h:mm AM/PM"},
      {19, "h:mm:ss AM/PM"},
      {20, "h:mm"},
      {21, "h:mm:ss"},
      {22, "m/d/yy h:mm"},
      {37, "#,##0 ;(#,##0)"},
      {38, "#,##0 ;[Red](#,##0)"},
      {39, "#,##0.00;(#,##0.00)"},
      {40, "#,##0.00;[Red](#,##0.00)"},
      {45, "mm:ss"},
      {46, "[h]:mm:ss"},
      {47, "mmss.0"},
      {48, "##0.0E+0"},
      {49, "@"},
  };
  return table;
}

// Default Office theme, in the index order used by style attributes
// (light 1 and dark 1 come swapped relative to the theme part).
inline constexpr std::array<std::string_view, 12> kThemePalette = {
    "#ffffff", "#000000", "#e7e6e6", "#44546a", "#4472c4", "#ed7d31",
    "#a5a5a5", "#ffc000", "#5b9bd5", "#70ad47", "#0563c1", "#954f72"};

inline constexpr std::array<std::string_view, 8> kIndexedPalette = {
    "#000000", "#ffffff", "#ff0000", "#00ff00", "#0000ff", "#ffff00", "#ff00ff", "#00ffff"};

inline std::string lower_hex(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'F') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

inline std::optional<std::string> read_color(const XmlNode* color) {
  if (!color) return std::nullopt;
  if (color->attr_or("auto", "0") == "1") return std::nullopt;
  if (const std::string* rgb = color->attr("rgb")) {
    std::string_view v = *rgb;
    if (v.size() == 8) v.remove_prefix(2);  // ARGB
    if (v.size() != 6 || !std::all_of(v.begin(), v.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); }))
      return std::nullopt;
    return "#" + lower_hex(v);
  }
  if (const std::string* theme = color->attr("theme")) {
    int i = std::atoi(theme->c_str());
    if (i >= 0 && i < static_cast<int>(kThemePalette.size())) return std::string(kThemePalette[static_cast<std::size_t>(i)]);
    return std::nullopt;
  }
  if (const std::string* indexed = color->attr("indexed")) {
    int i = std::atoi(indexed->c_str());
    if (i >= 8 && i < 16) i -= 8;
    if (i >= 0 && i < 8) return std::string(kIndexedPalette[static_cast<std::size_t>(i)]);
    if (i == 64) return std::string("#000000");  // system foreground
  }
  return std::nullopt;
}

// <b/>, <b val="0"/>, <u val="none"/> ...
inline bool flag_element(const XmlNode* props, std::string_view name) {
  const XmlNode* n = props ? props->child(name) : nullptr;
  if (!n) return false;
  std::string v = n->attr_or("val", "1");
  return !(v == "0" || v == "false" || v == "none");
}

inline Formatting read_font(const XmlNode* font) {
  Formatting f;
  if (!font) return f;
  f.bold = flag_element(font, "b");
  f.italic = flag_element(font, "i");
  f.underline = flag_element(font, "u");
  f.strike = flag_element(font, "strike");
  f.color = read_color(font->child("color")).value_or("");
  if (!f.colored()) f.color.clear();
  return f;
}

struct CellStyle {
  std::optional<std::string> number_format;
  Formatting font;
};

struct Styles {
  std::vector<CellStyle> xfs;

  const CellStyle& at(std::size_t i) const {
    static const CellStyle none;
    return i < xfs.size() ? xfs[i] : none;
  }
};

inline Styles read_styles(const XmlNode* root) {
  Styles styles;
  if (!root) return styles;
  std::map<int, std::string> custom;
  if (const XmlNode* fmts = root->child("numFmts"))
    for (const XmlNode* f : fmts->all("numFmt")) custom[std::atoi(f->attr_or("numFmtId", "0").c_str())] = f->attr_or("formatCode", "");
  std::vector<Formatting> fonts;
  if (const XmlNode* fs = root->child("fonts"))
    for (const XmlNode* f : fs->all("font")) fonts.push_back(read_font(f));
  if (const XmlNode* xfs = root->child("cellXfs")) {
    for (const XmlNode* xf : xfs->all("xf")) {
      CellStyle style;
      int id = std::atoi(xf->attr_or("numFmtId", "0").c_str());
      if (auto it = custom.find(id); it != custom.end()) {
        if (it->second != "General" && !it->second.empty()) style.number_format = it->second;
      } else if (auto b = builtin_number_formats().find(id); b != builtin_number_formats().end()) {
        style.number_format = b->second;
      }
      auto font = static_cast<std::size_t>(std::atoi(xf->attr_or("fontId", "0").c_str()));
      // The default font (id 0) is the baseline every cell is measured against.
      if (font != 0 && font < fonts.size()) style.font = fonts[font];
      styles.xfs.push_back(std::move(style));
    }
  }
  return styles;
}

// A string item: <si>/<is> with either <t> or rich <r> runs.
struct StringItem {
  std::string text;
  // One entry per <r>; nullopt when the run has no own properties.
  std::vector<std::pair<std::string, std::optional<Formatting>>> runs;
};

inline StringItem read_string_item(const XmlNode* item) {
  StringItem out;
  for (const auto& c : item->children) {
    if (c->name == "t") {
      out.text += c->text;
      out.runs.emplace_back(c->text, std::nullopt);
    } else if (c->name == "r") {
      const XmlNode* t = c->child("t");
      std::string piece = t ? t->text : std::string();
      const XmlNode* props = c->child("rPr");
      out.text += piece;
      out.runs.emplace_back(std::move(piece), props ? std::optional<Formatting>(read_font(props)) : std::nullopt);
    }
    // <rPh> phonetic hints and <phoneticPr> are ignored.
  }
  return out;
}

inline CellValue string_cell(const StringItem& item, const Formatting& cell_font) {
  if (item.text.empty()) return Blank{};
  std::vector<TextRun> runs;
  for (const auto& [text, props] : item.runs) runs.push_back({text, props.value_or(cell_font)});
  runs = merge_runs(std::move(runs));
  bool formatted = runs.size() > 1 || std::any_of(runs.begin(), runs.end(), [](const TextRun& r) { return !r.format.plain(); });
  if (!formatted) return Text{item.text};
  return RichText{render_fragment(runs)};
}

inline std::string resolve_target(const std::string& base_dir, const std::string& target) {
  if (!target.empty() && target.front() == '/') return target.substr(1);
  std::vector<std::string> parts;
  std::string joined = base_dir + target;
  std::stringstream ss(joined);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
    } else {
      parts.push_back(seg);
    }
  }
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "/") + p;
  return out;
}

inline std::map<std::string, std::string> read_relationships(const ZipArchive& zip, const std::string& part,
                                                             const std::string& base_dir) {
  std::map<std::string, std::string> rels;
  auto slash = part.rfind('/');
  std::string rels_part = (slash == std::string::npos ? std::string() : part.substr(0, slash + 1)) + "_rels/" +
                          (slash == std::string::npos ? part : part.substr(slash + 1)) + ".rels";
  if (!zip.contains(rels_part)) return rels;
  auto root = parse_xml(zip.read(rels_part), rels_part);
  for (const XmlNode* r : root->all("Relationship"))
    if (r->attr_or("TargetMode", "") != "External") rels[r->attr_or("Id", "")] = resolve_target(base_dir, r->attr_or("Target", ""));
  return rels;
}

inline std::optional<std::pair<std::uint32_t, std::uint32_t>> parse_cell_ref(std::string_view ref) {
  std::size_t i = 0;
  while (i < ref.size() && ref[i] >= 'A' && ref[i] <= 'Z') ++i;
  auto col = parse_column_letter(ref.substr(0, i));
  if (!col || i == ref.size()) return std::nullopt;
  std::uint64_t row = 0;
  for (std::size_t j = i; j < ref.size(); ++j) {
    if (ref[j] < '0' || ref[j] > '9') return std::nullopt;
    row = row * 10 + static_cast<std::uint64_t>(ref[j] - '0');
    if (row > 1u << 24) return std::nullopt;
  }
  if (row == 0) return std::nullopt;
  return std::pair{*col, static_cast<std::uint32_t>(row - 1)};
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline Sheet read_worksheet(const XmlNode& root, const std::string& name, const std::vector<StringItem>& shared,
                            const Styles& styles) {
  struct Placed {
    std::uint32_t column, row;
    CellValue value;
  };
  std::vector<Placed> placed;
  std::uint32_t width = 0, height = 0;
  const XmlNode* data = root.child("sheetData");
  std::uint32_t next_row = 0;
  if (data) {
    for (const XmlNode* row : data->all("row")) {
      std::uint32_t r = next_row;
      if (const std::string* rr = row->attr("r")) r = static_cast<std::uint32_t>(std::max(1L, std::atol(rr->c_str())) - 1);
      next_row = r + 1;
      std::uint32_t next_col = 0;
      for (const XmlNode* c : row->all("c")) {
        std::uint32_t col = next_col, rownum = r;
        if (const std::string* ref = c->attr("r")) {
          auto p = parse_cell_ref(*ref);
          if (!p) throw IngestError("sheet '" + name + "': bad cell reference '" + *ref + "'");
          col = p->first;
          rownum = p->second;
        }
        next_col = col + 1;
        const CellStyle& style = styles.at(static_cast<std::size_t>(std::atoi(c->attr_or("s", "0").c_str())));
        std::string type = c->attr_or("t", "n");
        const XmlNode* v = c->child("v");
        std::string raw = v ? v->text : std::string();
        CellValue value = Blank{};
        std::string where = "sheet '" + name + "' cell " + column_letter(col) + std::to_string(rownum + 1);
        if (type == "s") {
          if (v) {
            auto idx = parse_double(raw);
            if (!idx || *idx < 0 || *idx >= static_cast<double>(shared.size()))
              throw IngestError(where + ": shared string index out of range");
            value = string_cell(shared[static_cast<std::size_t>(*idx)], style.font);
          }
        } else if (type == "inlineStr") {
          if (const XmlNode* is = c->child("is")) value = string_cell(read_string_item(is), style.font);
        } else if (type == "b") {
          if (v) value = Boolean{raw == "1" || raw == "true"};
        } else if (type == "str" || type == "e" || type == "d") {
          if (!raw.empty()) value = string_cell(StringItem{raw, {{raw, std::nullopt}}}, style.font);
        } else if (type == "n") {
          if (v && !raw.empty()) {
            auto d = parse_double(raw);
            if (!d) throw IngestError(where + ": malformed number '" + raw + "'");
            value = Numeric{*d, style.number_format};
          }
        } else {
          throw IngestError(where + ": unknown cell type '" + type + "'");
        }
        if (is_blank(value)) continue;
        width = std::max(width, col + 1);
        height = std::max(height, rownum + 1);
        placed.push_back({col, rownum, std::move(value)});
      }
    }
  }
  Sheet sheet(name, width, height);
  for (auto& p : placed) sheet.set(p.column, p.row, std::move(p.value));
  return sheet;
}

}  // namespace detail

inline Workbook read_xlsx(std::string_view bytes) {
  static constexpr std::string_view kOle = "\xD0\xCF\x11\xE0\xA1\xB1\x1A\xE1";
  if (bytes.substr(0, kOle.size()) == kOle)
    throw UnsupportedError("file is an OLE compound document (password-protected workbook or legacy XLS)");
  if (bytes.substr(0, 2) != "PK") throw IngestError("not an XLSX file (missing ZIP signature)");

  detail::ZipArchive zip(bytes);
  std::string workbook_part = "xl/workbook.xml";
  if (zip.contains("_rels/.rels")) {
    auto root = detail::parse_xml(zip.read("_rels/.rels"), "_rels/.rels");
    for (const detail::XmlNode* r : root->all("Relationship"))
      if (r->attr_or("Type", "").ends_with("/officeDocument")) workbook_part = detail::resolve_target("", r->attr_or("Target", ""));
  }
  if (!zip.contains(workbook_part)) throw IngestError("workbook part '" + workbook_part + "' not found");
  std::string base_dir = workbook_part.substr(0, workbook_part.rfind('/') + 1);
  auto rels = detail::read_relationships(zip, workbook_part, base_dir);

  std::vector<detail::StringItem> shared;
  std::string shared_part = base_dir + "sharedStrings.xml";
  std::string styles_part = base_dir + "styles.xml";
  // Targets declared in the relationships win over the conventional names.
  auto wb_rels_part = base_dir + "_rels/" + workbook_part.substr(base_dir.size()) + ".rels";
  if (zip.contains(wb_rels_part)) {
    auto root = detail::parse_xml(zip.read(wb_rels_part), wb_rels_part);
    for (const detail::XmlNode* r : root->all("Relationship")) {
      std::string type = r->attr_or("Type", "");
      if (type.ends_with("/sharedStrings")) shared_part = detail::resolve_target(base_dir, r->attr_or("Target", ""));
      if (type.ends_with("/styles")) styles_part = detail::resolve_target(base_dir, r->attr_or("Target", ""));
    }
  }
  if (zip.contains(shared_part)) {
    auto root = detail::parse_xml(zip.read(shared_part), shared_part);
    for (const detail::XmlNode* si : root->all("si")) shared.push_back(detail::read_string_item(si));
  }
  detail::Styles styles;
  if (zip.contains(styles_part)) {
    auto root = detail::parse_xml(zip.read(styles_part), styles_part);
    styles = detail::read_styles(root.get());
  }

  auto wb = detail::parse_xml(zip.read(workbook_part), workbook_part);
  const detail::XmlNode* sheets = wb->child("sheets");
  if (!sheets) throw IngestError("workbook lists no sheets");

  Workbook book;
  std::set<std::string> names;
  for (const detail::XmlNode* s : sheets->all("sheet")) {
    std::string name = s->attr_or("name", "");
    if (!names.insert(name).second) throw IngestError("duplicate sheet name '" + name + "'");
    auto it = rels.find(s->attr_or("id", ""));
    if (it == rels.end()) throw IngestError("sheet '" + name + "' has no worksheet part");
    if (!zip.contains(it->second)) {
      book.warnings.push_back("sheet '" + name + "' is not a worksheet; skipped");
      continue;
    }
    auto root = detail::parse_xml(zip.read(it->second), it->second);
    if (root->name != "worksheet") {
      book.warnings.push_back("sheet '" + name + "' is not a worksheet; skipped");
      continue;
    }
    book.sheets.push_back(detail::read_worksheet(*root, name, shared, styles));
  }
  return book;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline Workbook read_xlsx_file(const std::filesystem::path& path) {
  try {
    return read_xlsx(read_file_bytes(path));
  } catch (const UnsupportedError& e) {
    throw UnsupportedError(path.string() + ": " + e.what());
  } catch (const IngestError& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

}  // namespace tabrml
