#pragma once

#include <string>
#include <string_view>

namespace secount {

/// Shortest round-trip decimal form ("%.17g" trimmed), "nan"/"inf" spelled out.
std::string format_double(double x);

/// Quotes a field when it contains a comma, quote, or line break.
std::string csv_field(std::string_view s);

}  // namespace secount
