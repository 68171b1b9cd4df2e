#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <system_error>

namespace treeloss {

/// Locale-independent double formatting. sig_digits > 0 rounds to that many
/// significant digits; sig_digits == 0 emits the shortest representation that
/// round-trips exactly. Non-finite values are refused: nothing downstream
/// (CSV, config files) is ever allowed to carry a NaN or infinity.
inline std::string format_double(double value, int sig_digits = 0) {
    if (!std::isfinite(value))
        throw std::logic_error("format_double: refusing to emit a non-finite value");
    char buf[64];
    std::to_chars_result res =
        sig_digits > 0
            ? std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general,
                            sig_digits)
            : std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc())
        throw std::logic_error("format_double: formatting failed");
    return std::string(buf, res.ptr);
}

inline std::string format_u64(std::uint64_t value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long value) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

}  // namespace treeloss
