#pragma once

#include <cstdio>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace htcov {

/// Shortest round-trippable decimal form; output files must be byte-stable.
inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_join(std::span<const std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  return out;
}

inline std::string csv_join(std::initializer_list<std::string> fields) {
  return csv_join(std::span<const std::string>(fields.begin(), fields.size()));
}

}  // namespace htcov
