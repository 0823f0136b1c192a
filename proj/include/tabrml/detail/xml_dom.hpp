#pragma once

// Tiny element tree built with expat. Namespace prefixes are dropped from
// element and attribute names.

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <expat.h>

#include "tabrml/error.hpp"

namespace tabrml::detail {

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<XmlNode>> children;
  std::string text;  // character data directly inside this element

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }
  std::string attr_or(std::string_view key, std::string fallback) const {
    const std::string* v = attr(key);
    return v ? *v : std::move(fallback);
  }
  const XmlNode* child(std::string_view n) const {
    for (const auto& c : children)
      if (c->name == n) return c.get();
    return nullptr;
  }
  std::vector<const XmlNode*> all(std::string_view n) const {
    std::vector<const XmlNode*> out;
    for (const auto& c : children)
      if (c->name == n) out.push_back(c.get());
    return out;
  }
};

inline std::string local_name(const char* qualified) {
  std::string_view s(qualified);
  auto colon = s.rfind(':');
  return std::string(colon == std::string_view::npos ? s : s.substr(colon + 1));
}

inline std::unique_ptr<XmlNode> parse_xml(std::string_view text, const std::string& part) {
  struct State {
    std::unique_ptr<XmlNode> root;
    std::vector<XmlNode*> stack;
  } state;

  XML_Parser parser = XML_ParserCreate("UTF-8");
  if (!parser) throw IngestError("xml: out of memory");
  XML_SetUserData(parser, &state);
  XML_SetElementHandler(
      parser,
      [](void* data, const XML_Char* name, const XML_Char** attrs) {
        auto* st = static_cast<State*>(data);
        auto node = std::make_unique<XmlNode>();
        node->name = local_name(name);
        for (std::size_t i = 0; attrs[i]; i += 2) node->attributes.emplace_back(local_name(attrs[i]), attrs[i + 1]);
        XmlNode* raw = node.get();
        if (st->stack.empty())
          st->root = std::move(node);
        else
          st->stack.back()->children.push_back(std::move(node));
        st->stack.push_back(raw);
      },
      [](void* data, const XML_Char*) { static_cast<State*>(data)->stack.pop_back(); });
  XML_SetCharacterDataHandler(parser, [](void* data, const XML_Char* s, int len) {
    auto* st = static_cast<State*>(data);
    if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<std::size_t>(len));
  });
  bool ok = XML_Parse(parser, text.data(), static_cast<int>(text.size()), 1) == XML_STATUS_OK;
  std::string error;
  if (!ok)
    error = std::string(XML_ErrorString(XML_GetErrorCode(parser))) + " at line " +
            std::to_string(XML_GetCurrentLineNumber(parser));
  XML_ParserFree(parser);
  if (!ok) throw IngestError("xml: " + part + ": " + error);
  if (!state.root) throw IngestError("xml: " + part + ": empty document");
  return std::move(state.root);
}

}  // namespace tabrml::detail
