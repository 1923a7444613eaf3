#pragma once

#include <cstdio>
#include <string>

namespace banachproj {

/// Round-trip decimal form ("%.17g"); the same bits always print the same text.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace banachproj
