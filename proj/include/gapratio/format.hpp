#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace gapratio {

// 17 significant digits: enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv_row(std::ostream& out, double a, double b) {
    out << format_double(a) << ',' << format_double(b) << '\n';
}

inline void write_csv_row(std::ostream& out, double a, double b, double c) {
    out << format_double(a) << ',' << format_double(b) << ',' << format_double(c) << '\n';
}

}  // namespace gapratio
