#pragma once
#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace distspec {

/// Shortest decimal representation that round-trips the exact double value.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("float formatting failed");
    return std::string(buf, ptr);
}

/// Strict parse of a whole token as a double; returns false on any leftover.
inline bool parse_double(std::string_view tok, double& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

inline bool parse_long(std::string_view tok, long long& out) {
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace distspec
