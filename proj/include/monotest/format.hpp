#pragma once

#include <charconv>
#include <string>

namespace monotest {

/// Shortest round-trip decimal form of x (locale independent).
[[nodiscard]] inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace monotest
