#include "siv/csv.hpp"

#include <cstdio>

namespace siv::csv {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_row(std::ostream& os, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

void write_row(std::ostream& os, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << g17(values[i]);
  }
  os << '\n';
}

std::string cell(double x, int width) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%*.8g", width, x);
  return buf;
}

}  // namespace siv::csv
