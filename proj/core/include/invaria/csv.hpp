#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace invaria::csv {

/// Shortest-unambiguous-enough decimal: printf "%.17g".
std::string format(double v);

void write_header(std::ostream& os, std::initializer_list<std::string_view> columns);
void write_row(std::ostream& os, std::span<const double> values);
void write_row(std::ostream& os, std::initializer_list<double> values);

}  // namespace invaria::csv
