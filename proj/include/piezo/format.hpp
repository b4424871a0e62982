#pragma once

#include <charconv>
#include <string>

namespace piezo {

/// Shortest decimal form that round-trips to the same double. Locale
/// independent, so text outputs are byte-stable across runs.
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace piezo
