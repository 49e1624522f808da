#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace siv::csv {

/// Shortest round-trip decimal form of a double (17 significant digits,
/// '.' decimal separator, locale independent).
std::string g17(double x);

/// Writes one CSV record terminated by LF.
void write_row(std::ostream& os, std::span<const std::string> fields);
void write_row(std::ostream& os, std::span<const double> values);

/// Fixed-width numeric cell for human-readable tables.
std::string cell(double x, int width = 14);

}  // namespace siv::csv
