#include "cotrap/csv.hpp"

#include <cstdio>

namespace cotrap::csv {

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_header(std::ostream& out, std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) {
    if (!first) out << ',';
    out << n;
    first = false;
  }
  out << '\n';
}

}  // namespace cotrap::csv
