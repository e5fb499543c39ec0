#pragma once

#include <charconv>
#include <string>
#include <system_error>

// Locale-independent number formatting (std::to_chars) so rendered output is
// byte-stable across runs and platforms.

namespace cspc {

/// Shortest decimal that round-trips to the same double.
inline std::string fmt_shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// General format with the given number of significant digits.
inline std::string fmt_sig(double v, int digits) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

} // namespace cspc
