#pragma once

#include <charconv>
#include <string>

namespace curvedim {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace curvedim
