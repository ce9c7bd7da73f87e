#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace cotrap::csv {

/// 17 significant digits, enough to round-trip any double.
std::string format(double v);

/// Quotes a field per RFC 4180 when it contains a comma, quote or newline.
std::string field(std::string_view text);

void write_header(std::ostream& out, std::initializer_list<std::string_view> names);

}  // namespace cotrap::csv
