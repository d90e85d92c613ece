// int128.hpp
// 128-bit integer aliases and helpers shared across the library.
// Coefficients, traces and factor candidates all live in the signed
// 128-bit range; files and CSV need decimal round-trips for them.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hecke {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr i128 I128_MAX = i128((u128(1) << 127) - 1);
inline constexpr i128 I128_MIN = -I128_MAX - 1;

constexpr u128 abs_u128(i128 x) {
    return x < 0 ? u128(0) - u128(x) : u128(x);
}

// Position of the highest set bit plus one; bit_width(0) == 0.
constexpr int bit_width_u128(u128 x) {
    int n = 0;
    if (x >> 64) { n += 64; x >>= 64; }
    u64 lo = u64(x);
    while (lo) { ++n; lo >>= 1; }
    return n;
}

// Floor square / cube roots; valid for n < 2^127 (no product wraparound).
inline u128 isqrt_u128(u128 n) {
    if (n == 0) return 0;
    u128 r = u128(std::max(1.0L, sqrtl((long double)n)));
    while (r > 1 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline u128 icbrt_u128(u128 n) {
    if (n == 0) return 0;
    u128 r = u128(std::max(1.0L, cbrtl((long double)n)));
    while (r > 1 && r * r * r > n) --r;
    while ((r + 1) * (r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline std::string to_string_u128(u128 x) {
    if (x == 0) return "0";
    char buf[40];
    int pos = 40;
    while (x) {
        buf[--pos] = char('0' + int(x % 10));
        x /= 10;
    }
    return std::string(buf + pos, 40 - pos);
}

inline std::string to_string_i128(i128 x) {
    return x < 0 ? "-" + to_string_u128(abs_u128(x)) : to_string_u128(u128(x));
}

// Parses an optionally signed decimal integer in the i128 range.
inline i128 parse_i128(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("parse_i128: empty string");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') { neg = s[0] == '-'; i = 1; }
    if (i == s.size()) throw std::invalid_argument("parse_i128: no digits");
    u128 mag = 0;
    const u128 limit = u128(1) << 127;  // |value| <= 2^127, sign-checked below
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c < '0' || c > '9') throw std::invalid_argument("parse_i128: bad digit");
        u128 next = mag * 10 + u128(c - '0');
        if (next < mag || next > limit) throw std::out_of_range("parse_i128: overflow");
        mag = next;
    }
    if (!neg && mag == limit) throw std::out_of_range("parse_i128: overflow");
    return neg ? i128(u128(0) - mag) : i128(mag);
}

}  // namespace hecke
