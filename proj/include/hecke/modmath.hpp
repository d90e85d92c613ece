// modmath.hpp
// Modular arithmetic primitives: word-size mulmod/powmod, Montgomery
// multiplication at 64 and 128 bits, and strong-probable-prime testing
// for the full signed-128-bit factoring range.
//
// The 128-bit Montgomery path widens through 256-bit limb products; it
// is the workhorse behind Pollard rho on cofactors above 2^64.
#pragma once

#include <bit>
#include <cstdint>

#include "hecke/int128.hpp"

namespace hecke {

constexpr u64 mulmod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

constexpr u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

constexpr u128 gcd_u128(u128 a, u128 b) {
    while (b) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Montgomery arithmetic mod an odd m < 2^63, R = 2^64.
// The bound keeps t + q*m below 2^128 in reduce(); wider moduli go
// through Montgomery128.
struct Montgomery64 {
    u64 mod;
    u64 neg_inv;  // -mod^-1 mod 2^64
    u64 r1;       // 2^64 mod m (Montgomery form of 1)
    u64 r2;       // 2^128 mod m

    constexpr explicit Montgomery64(u64 m) : mod(m), neg_inv(0), r1(0), r2(0) {
        u64 inv = m;  // Newton iteration: inv *= 2 - m*inv, doubles correct bits
        for (int i = 0; i < 5; ++i) inv *= 2 - m * inv;
        neg_inv = ~inv + 1;
        r1 = u64(((u128(1) << 64)) % m);
        r2 = u64(u128(r1) * r1 % m);
    }

    constexpr u64 reduce(u128 t) const {
        u64 q = u64(t) * neg_inv;
        u64 r = u64((t + u128(q) * mod) >> 64);
        return r >= mod ? r - mod : r;
    }

    constexpr u64 mul(u64 a, u64 b) const { return reduce(u128(a) * b); }
    constexpr u64 to(u64 a) const { return mul(a % mod, r2); }
    constexpr u64 from(u64 a) const { return reduce(a); }
    constexpr u64 one() const { return r1; }

    constexpr u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= mod ? s - mod : s;
    }
    constexpr u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + mod - b; }

    constexpr u64 pow(u64 base_m, u64 e) const {  // base already in Montgomery form
        u64 r = one();
        while (e) {
            if (e & 1) r = mul(r, base_m);
            base_m = mul(base_m, base_m);
            e >>= 1;
        }
        return r;
    }
};

namespace detail {

struct U256 {
    u128 lo, hi;
};

constexpr U256 mul_full_u128(u128 a, u128 b) {
    u64 a0 = u64(a), a1 = u64(a >> 64);
    u64 b0 = u64(b), b1 = u64(b >> 64);
    u128 p00 = u128(a0) * b0;
    u128 p01 = u128(a0) * b1;
    u128 p10 = u128(a1) * b0;
    u128 p11 = u128(a1) * b1;
    u128 mid = p01 + (p00 >> 64);
    u128 hi = p11 + (mid >> 64);
    mid = u128(u64(mid)) + p10;
    hi += mid >> 64;
    u128 lo = (mid << 64) | u64(p00);
    return {lo, hi};
}

}  // namespace detail

// Montgomery arithmetic mod an odd m < 2^127, R = 2^128.
struct Montgomery128 {
    u128 mod;
    u128 neg_inv;  // -mod^-1 mod 2^128
    u128 r1;       // 2^128 mod m
    u128 r2;       // 2^256 mod m

    constexpr explicit Montgomery128(u128 m) : mod(m), neg_inv(0), r1(0), r2(0) {
        u128 inv = m;
        for (int i = 0; i < 6; ++i) inv *= 2 - m * inv;
        neg_inv = ~inv + 1;
        r1 = (u128(0) - m) % m;  // 2^128 - m == 2^128 (mod m) since m < 2^127
        u128 v = r1;
        for (int i = 0; i < 128; ++i) {  // r2 = r1 * 2^128 mod m by doubling
            v += v;                      // v < m < 2^127, so no wrap
            if (v >= mod) v -= mod;
        }
        r2 = v;
    }

    constexpr u128 reduce(detail::U256 t) const {
        u128 q = t.lo * neg_inv;
        detail::U256 qm = detail::mul_full_u128(q, mod);
        u128 lo = t.lo + qm.lo;
        u128 carry = lo < t.lo ? 1 : 0;
        u128 hi = t.hi + qm.hi + carry;  // cannot overflow: t, qm < m*2^128
        return hi >= mod ? hi - mod : hi;
    }

    constexpr u128 mul(u128 a, u128 b) const { return reduce(detail::mul_full_u128(a, b)); }
    constexpr u128 to(u128 a) const { return mul(a % mod, r2); }
    constexpr u128 from(u128 a) const { return reduce({a, 0}); }
    constexpr u128 one() const { return r1; }

    constexpr u128 add(u128 a, u128 b) const {
        u128 s = a + b;
        return (s >= mod || s < a) ? s - mod : s;
    }
    constexpr u128 sub(u128 a, u128 b) const { return a >= b ? a - b : a + mod - b; }

    constexpr u128 pow(u128 base_m, u128 e) const {
        u128 r = one();
        while (e) {
            if (e & 1) r = mul(r, base_m);
            base_m = mul(base_m, base_m);
            e >>= 1;
        }
        return r;
    }
};

namespace detail {

template <typename Mont, typename Uint>
constexpr bool sprp_round(const Mont& mg, Uint n, Uint d, int s, Uint base) {
    Uint a = base % n;
    if (a == 0) return true;
    Uint x = mg.pow(mg.to(a), d);
    Uint one = mg.one();
    Uint minus_one = n - one;
    if (x == one || x == minus_one) return true;
    for (int i = 1; i < s; ++i) {
        x = mg.mul(x, x);
        if (x == minus_one) return true;
    }
    return false;
}

}  // namespace detail

// Strong-probable-prime test. Deterministic below 2^64 (the 7-base set of
// Sinclair); 25 fixed prime bases above, error probability < 4^-25.
constexpr bool is_probable_prime(u128 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    u128 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    constexpr u64 det_bases[] = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    if (n >> 63 == 0) {
        Montgomery64 mg{u64(n)};
        for (u64 a : det_bases) {
            if (!detail::sprp_round<Montgomery64, u64>(mg, u64(n), u64(d), s, a)) return false;
        }
        return true;
    }
    Montgomery128 mg{n};
    if (n >> 64 == 0) {  // still covered by the deterministic set
        for (u64 a : det_bases) {
            if (!detail::sprp_round<Montgomery128, u128>(mg, n, d, s, a)) return false;
        }
        return true;
    }
    constexpr u64 bases[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                             43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    for (u64 a : bases) {
        if (!detail::sprp_round<Montgomery128, u128>(mg, n, d, s, a)) return false;
    }
    return true;
}

}  // namespace hecke
