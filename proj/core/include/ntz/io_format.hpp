#pragma once

#include <cstdio>
#include <string>

namespace ntz {

/// Shortest-round-trip-safe decimal text for CSV output (17 significant digits).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace ntz
