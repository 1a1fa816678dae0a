#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

#include "adapt/util/error.hpp"

namespace adapt {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_exact(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("invalid number '" + std::string(s) + "'");
  return v;
}

}  // namespace adapt
