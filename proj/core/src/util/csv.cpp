#include "osmorom/util/csv.hpp"

#include <cstdio>
#include <ostream>

namespace osmorom::util {

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

}  // namespace osmorom::util
