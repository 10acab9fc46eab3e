#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include "crowdcheck/errors.hpp"

namespace crowdcheck {

// Fixed 15-significant-digit form used in every emitted CSV. Stable
// under re-parsing: parse(to_sig15(x)) prints back to the same string.
inline std::string to_sig15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::string(buf);
}

inline double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw RowError(line, "cannot parse number from \"" + std::string(s) + "\"");
    return v;
}

inline long parse_long(std::string_view s, std::size_t line) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw RowError(line, "cannot parse integer from \"" + std::string(s) + "\"");
    return v;
}

} // namespace crowdcheck
