// wide_uint.hpp
// Fixed-width little-endian multi-word unsigned integers.
// Just enough arithmetic for exact CRT reconstruction (up to 8 x 62-bit
// moduli = 496 bits) and exact p^(k-1) coefficient-bound checks.
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <stdexcept>

#include "hecke/int128.hpp"

namespace hecke {

template <std::size_t Words>
struct WideUInt {
    static_assert(Words >= 2);
    std::array<u64, Words> w{};  // w[0] = least significant

    constexpr WideUInt() = default;

    static constexpr WideUInt from_u64(u64 v) {
        WideUInt r;
        r.w[0] = v;
        return r;
    }

    static constexpr WideUInt from_u128(u128 v) {
        WideUInt r;
        r.w[0] = u64(v);
        r.w[1] = u64(v >> 64);
        return r;
    }

    constexpr bool fits_u128() const {
        for (std::size_t i = 2; i < Words; ++i)
            if (w[i]) return false;
        return true;
    }

    constexpr u128 to_u128() const { return (u128(w[1]) << 64) | w[0]; }

    constexpr bool is_zero() const {
        for (u64 x : w)
            if (x) return false;
        return true;
    }

    constexpr int bit_width() const {
        for (std::size_t i = Words; i-- > 0;)
            if (w[i]) return int(64 * i) + bit_width_u128(w[i]);
        return 0;
    }

    friend constexpr std::strong_ordering operator<=>(const WideUInt& a, const WideUInt& b) {
        for (std::size_t i = Words; i-- > 0;) {
            if (a.w[i] != b.w[i]) return a.w[i] <=> b.w[i];
        }
        return std::strong_ordering::equal;
    }
    friend constexpr bool operator==(const WideUInt&, const WideUInt&) = default;

    // Throws on carry out of the top word.
    constexpr WideUInt& operator+=(const WideUInt& o) {
        u128 carry = 0;
        for (std::size_t i = 0; i < Words; ++i) {
            u128 s = u128(w[i]) + o.w[i] + carry;
            w[i] = u64(s);
            carry = s >> 64;
        }
        if (carry) throw std::overflow_error("WideUInt: addition overflow");
        return *this;
    }

    constexpr WideUInt& add_u64(u64 v) {
        u128 carry = v;
        for (std::size_t i = 0; i < Words && carry; ++i) {
            u128 s = u128(w[i]) + carry;
            w[i] = u64(s);
            carry = s >> 64;
        }
        if (carry) throw std::overflow_error("WideUInt: addition overflow");
        return *this;
    }

    // Requires *this >= o.
    constexpr WideUInt& operator-=(const WideUInt& o) {
        u64 borrow = 0;
        for (std::size_t i = 0; i < Words; ++i) {
            u128 a = w[i];
            u128 b = u128(o.w[i]) + borrow;
            if (a >= b) {
                w[i] = u64(a - b);
                borrow = 0;
            } else {
                w[i] = u64((u128(1) << 64) + a - b);
                borrow = 1;
            }
        }
        if (borrow) throw std::underflow_error("WideUInt: subtraction underflow");
        return *this;
    }

    // Throws on carry out of the top word.
    constexpr WideUInt& mul_u64(u64 v) {
        u128 carry = 0;
        for (std::size_t i = 0; i < Words; ++i) {
            u128 prod = u128(w[i]) * v + carry;
            w[i] = u64(prod);
            carry = prod >> 64;
        }
        if (carry) throw std::overflow_error("WideUInt: multiplication overflow");
        return *this;
    }

    constexpr WideUInt& shr1() {
        for (std::size_t i = 0; i < Words; ++i) {
            w[i] >>= 1;
            if (i + 1 < Words) w[i] |= w[i + 1] << 63;
        }
        return *this;
    }
};

}  // namespace hecke
