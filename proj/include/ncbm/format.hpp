#pragma once

#include <charconv>
#include <string>

namespace ncbm {

/// Decimal, 17 significant digits, '.' separator; locale independent.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace ncbm
