#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace tabrml::detail {

// Shortest decimal text that parses back to exactly `v`.
inline std::string shortest_repr(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Like shortest_repr, but never uses exponent notation.
inline std::string shortest_fixed(double v) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string s(buf, res.ptr);
  if (s == "-0") s = "0";
  return s;
}

// Whole numbers below 2^53 render as plain integers; everything else falls
// back to the shortest fixed rendering.
inline std::string integer_text(double v) {
  if (std::fabs(v) < 9007199254740992.0) {
    long long n = static_cast<long long>(v);
    return std::to_string(n);
  }
  return shortest_fixed(v);
}

}  // namespace tabrml::detail
