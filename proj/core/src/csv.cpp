#include "invaria/csv.hpp"

#include <cstdio>
#include <ostream>

namespace invaria::csv {

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& os, std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto c : columns) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '\n';
}

void write_row(std::ostream& os, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << format(values[i]);
  }
  os << '\n';
}

void write_row(std::ostream& os, std::initializer_list<double> values) {
  write_row(os, std::span<const double>(values.begin(), values.size()));
}

}  // namespace invaria::csv
