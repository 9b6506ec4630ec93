#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace osmorom::util {

/// 17 significant digits, so every value round-trips.
std::string csv_number(double x);

/// Comma-separated row terminated by a newline. Cells are written verbatim.
void csv_row(std::ostream& os, const std::vector<std::string>& cells);

}  // namespace osmorom::util
