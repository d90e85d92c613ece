// arith.hpp
// Exact factorization and divisor counting for values up to 2^127 in
// magnitude. Strategy: trial division by primes <= 10^4, then Brent-cycle
// Pollard rho with strong-probable-prime certification of every factor.
//
// Divisor counts follow the convention d_r(n) = d_r(|n|); the statistics
// layer sums d(a(p)) with a(p) of either sign.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hecke/ecm.hpp"
#include "hecke/int128.hpp"
#include "hecke/modmath.hpp"
#include "hecke/primes.hpp"

namespace hecke {

struct Factorization {
    int sign = 1;                                   // +1 or -1
    std::vector<std::pair<u128, u32>> prime_powers;  // (prime, exponent), primes increasing

    i128 reconstruct() const {
        u128 v = 1;
        for (auto [p, e] : prime_powers)
            for (u32 i = 0; i < e; ++i) v *= p;
        return sign < 0 ? -i128(v) : i128(v);
    }
};

namespace detail {

inline const std::vector<u64>& small_primes() {
    static const std::vector<u64> table = sieve_primes(10'000).primes;
    return table;
}

// Brent-cycle rho with batched gcd. n odd composite, not a prime power of
// a small prime (those were stripped by trial division). Returns a
// nontrivial factor. Montgomery domain throughout: gcd(x*R mod n, n) has
// the same nontrivial divisors as gcd(x, n) because gcd(R, n) = 1.
template <typename Mont, typename Uint>
Uint rho_brent(Uint n, Uint c0) {
    const Mont mg{n};
    for (Uint c = c0;; ++c) {
        const Uint c_m = mg.to(c % n);
        Uint y = mg.to(2);
        Uint g = 1, r = 1, q = mg.one();
        Uint x = y, ys = y;
        const Uint batch = 128;
        while (g == 1) {
            x = y;
            for (Uint i = 0; i < r; ++i) y = mg.add(mg.mul(y, y), c_m);
            for (Uint k = 0; k < r && g == 1; k += batch) {
                ys = y;
                Uint lim = std::min(batch, r - k);
                for (Uint i = 0; i < lim; ++i) {
                    y = mg.add(mg.mul(y, y), c_m);
                    q = mg.mul(q, mg.sub(x, y));
                }
                g = Uint(gcd_u128(q == 0 ? n : q, n));
            }
            r *= 2;
        }
        if (g == n) {  // batch overshot; replay one step at a time
            g = 1;
            while (g == 1) {
                ys = mg.add(mg.mul(ys, ys), c_m);
                Uint diff = mg.sub(x, ys);
                g = Uint(gcd_u128(diff == 0 ? n : diff, n));
            }
        }
        if (g != n) return g;
        // cycle collapsed for this polynomial; retry with the next c
    }
}

// n odd composite without factors <= 10^4. rho handles word-size inputs
// (smallest factor < 2^31.5); larger inputs go to ECM, whose stage-1/2
// smoothness bounds beat rho's sqrt(p) wall for 40..60-bit factors.
// Perfect powers are peeled first so prime squares cannot stall ECM.
inline u128 find_factor(u128 n) {
    if (n >> 63 == 0) return rho_brent<Montgomery64, u64>(u64(n), u64(3));
    if (u128 r = isqrt_u128(n); r * r == n) return r;
    if (u128 r = icbrt_u128(n); r * r * r == n) return r;
    if (u128 g = ecm_factor(n); g != 0) return g;
    return rho_brent<Montgomery128, u128>(n, u128(3));
}

inline void factor_core(u128 n, std::vector<u128>& out) {
    if (n == 1) return;
    if (is_probable_prime(n)) {
        out.push_back(n);
        return;
    }
    u128 f = find_factor(n);
    factor_core(f, out);
    factor_core(n / f, out);
}

}  // namespace detail

// Complete factorization of n != 0, |n| < 2^127.
inline Factorization factor(i128 n) {
    if (n == 0) throw std::domain_error("factor: n must be nonzero");
    Factorization out;
    out.sign = n < 0 ? -1 : 1;
    u128 v = abs_u128(n);

    for (u64 p : detail::small_primes()) {
        if (u128(p) * p > v) break;
        if (v % p == 0) {
            u32 e = 0;
            while (v % p == 0) {
                v /= p;
                ++e;
            }
            out.prime_powers.emplace_back(p, e);
        }
    }
    if (v > 1) {
        std::vector<u128> rest;
        detail::factor_core(v, rest);
        std::sort(rest.begin(), rest.end());
        for (std::size_t i = 0; i < rest.size();) {
            std::size_t j = i;
            while (j < rest.size() && rest[j] == rest[i]) ++j;
            out.prime_powers.emplace_back(rest[i], u32(j - i));
            i = j;
        }
    }
    std::sort(out.prime_powers.begin(), out.prime_powers.end());
    return out;
}

// d_r(|n|) = number of ordered r-tuples with product |n|:
// multiplicative, with p^e contributing C(e+r-1, r-1). r = 2 is d(n).
inline u64 divisor_count_r(const Factorization& f, u32 r) {
    if (r < 2) throw std::invalid_argument("divisor_count_r: r must be >= 2");
    u128 total = 1;
    for (auto [p, e] : f.prime_powers) {
        // C(e+r-1, r-1) incrementally; values fit u128 comfortably
        u128 binom = 1;
        for (u32 i = 1; i < r; ++i) {
            binom = binom * (e + i) / i;  // exact: prefix products of C are integral
            if (binom >> 64) throw std::overflow_error("divisor_count_r: count exceeds 64 bits");
        }
        total *= binom;
        if (total >> 64) throw std::overflow_error("divisor_count_r: count exceeds 64 bits");
    }
    return u64(total);
}

inline u64 divisor_count(i128 n) { return divisor_count_r(factor(n), 2); }

// All positive divisors of |n|, ascending.
inline std::vector<u128> divisors(const Factorization& f) {
    std::vector<u128> out{1};
    for (auto [p, e] : f.prime_powers) {
        std::size_t base = out.size();
        u128 pe = 1;
        for (u32 i = 1; i <= e; ++i) {
            pe *= p;
            for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pe);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hecke
