#pragma once

#include <charconv>
#include <string>

namespace prevalence {

// Shortest decimal form that round-trips the exact double (to_chars).
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace prevalence
