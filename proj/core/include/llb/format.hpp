#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace llb {

/// Shortest-safe text form of a double: 17 significant digits, which
/// round-trips every finite binary64 value. Infinities print as "inf"/"-inf".
inline std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace llb
