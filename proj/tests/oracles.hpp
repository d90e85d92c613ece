// oracles.hpp
// Test-only reference implementations, deliberately independent of the
// library's algorithms: trial division instead of the segmented sieve,
// schoolbook convolution instead of the NTT, affine point enumeration
// instead of character sums, direct divisor loops instead of
// factorization formulas.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hecke/coeffs.hpp"
#include "hecke/int128.hpp"

namespace oracles {

using hecke::i128;
using hecke::i64;
using hecke::u128;
using hecke::u64;

inline bool trial_is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<u64> trial_primes(u64 limit) {
    std::vector<u64> out;
    for (u64 n = 2; n <= limit; ++n)
        if (trial_is_prime(n)) out.push_back(n);
    return out;
}

inline std::vector<i128> schoolbook(const std::vector<i128>& a, const std::vector<i128>& b,
                                    std::size_t cap_degree) {
    std::size_t len = std::min(a.size() + b.size() - 1, cap_degree + 1);
    std::vector<i128> out(len, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (i + j < len) out[i + j] += a[i] * b[j];
    return out;
}

// prod_{n=1..N-1} (1 - q^n)^24 truncated at q^(N-1), multiplied out one
// binomial factor at a time. Intermediates stay well inside i128 for
// N <= 600 (checked offline: peak is 114 bits at N = 600).
inline std::vector<i128> naive_eta24(std::size_t n_terms) {
    std::vector<i128> p(n_terms, 0);
    p[0] = 1;
    for (std::size_t n = 1; n < n_terms; ++n) {
        // binomial coefficients of (1 - q^n)^24
        std::vector<i128> f(n_terms, 0);
        i128 binom = 1;
        for (int j = 0; j <= 24; ++j) {
            if (n * std::size_t(j) >= n_terms) break;
            f[n * j] = (j % 2 ? -binom : binom);
            binom = binom * (24 - j) / (j + 1);
        }
        f.resize(n_terms);
        std::vector<i128> next(n_terms, 0);
        for (std::size_t i = 0; i < n_terms; ++i) {
            if (p[i] == 0) continue;
            for (std::size_t j = 0; i + j < n_terms; ++j)
                if (f[j] != 0) next[i + j] += p[i] * f[j];
        }
        p = std::move(next);
    }
    return p;  // p[m] = coefficient of q^m; tau(n) = p[n-1]
}

// prod (1 - q^n) truncated, then cubed by schoolbook.
inline std::vector<i128> naive_eta_cube(std::size_t n_terms) {
    std::vector<i128> e(n_terms, 0);
    e[0] = 1;
    for (std::size_t n = 1; n < n_terms; ++n) {
        std::vector<i128> next(n_terms, 0);
        for (std::size_t i = 0; i < n_terms; ++i) {
            if (e[i] == 0) continue;
            next[i] += e[i];
            if (i + n < n_terms) next[i + n] -= e[i];
        }
        e = std::move(next);
    }
    auto sq = schoolbook(e, e, n_terms - 1);
    return schoolbook(sq, e, n_terms - 1);
}

// #E(F_p) by affine enumeration of the long Weierstrass model, plus the
// point at infinity; a_p = p + 1 - #E.
inline i64 ec_trace_enumeration(const hecke::FormSpec& curve, u64 p) {
    auto [a1, a2, a3, a4, a6] = curve.weierstrass;
    auto red = [&](i64 v) { return u64(((v % i64(p)) + i64(p)) % i64(p)); };
    u64 count = 1;
    for (u64 x = 0; x < p; ++x) {
        u64 rhs =
            (((x * x % p) * x % p) + red(a2) * (x * x % p) % p + red(a4) * x % p + red(a6)) % p;
        for (u64 y = 0; y < p; ++y) {
            u64 lhs = (y * y % p + red(a1) * (x * y % p) % p + red(a3) * y % p) % p;
            if (lhs == rhs) ++count;
        }
    }
    return i64(p) + 1 - i64(count);
}

inline u64 brute_divisor_count(u64 n) {
    u64 c = 0;
    for (u64 d = 1; d * d <= n; ++d)
        if (n % d == 0) c += (d * d == n) ? 1 : 2;
    return c;
}

// ordered triples (n1, n2, n3) with product n
inline u64 brute_d3(u64 n) {
    u64 c = 0;
    for (u64 a = 1; a <= n; ++a) {
        if (n % a) continue;
        u64 m = n / a;
        for (u64 b = 1; b <= m; ++b)
            if (m % b == 0) ++c;
    }
    return c;
}

inline std::vector<i128> full_factor_trial(u128 n) {
    std::vector<i128> fs;
    for (u128 d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            fs.push_back(i128(d));
            n /= d;
        }
    if (n > 1) fs.push_back(i128(n));
    return fs;
}

}  // namespace oracles
