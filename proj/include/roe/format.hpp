#pragma once

#include <string>
#include <string_view>

namespace roe {

// Locale-independent number formatting. Shortest round-trip form unless a
// significant-digit count is given. Infinity is written as "inf".
std::string format_real(double v);
std::string format_real(double v, int significant_digits);

// Locale-independent parsing; accepts "inf". Throws Error(malformed_input).
double parse_real(std::string_view text);
long long parse_integer(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace roe
