#pragma once

#include <cstdio>
#include <string>

namespace survscore::cli {

/// Six significant digits, the precision of every number the tool prints.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

}  // namespace survscore::cli
