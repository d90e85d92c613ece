// bounds.hpp
// The inequality laboratory: the Friedlander-Iwaniec divisor majorization
// d_r(n) <= sum over small divisors of (2 d(delta))^((r-1) m log m / log 2),
// the Rankin/Ingham partial-sum bound through a truncated Dirichlet
// series, growth diagnostics for sum d(n)^c [h(n)], and the exponent
// bookkeeping m > 7k, c = m log m / log 2, A = 2^c - 1.
//
// The two lemma checks are theorems: holds must come back true for every
// admissible input. The growth diagnostics only report ratios; the
// implied constants are not pinned anywhere, so nothing asserts them.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hecke/arith.hpp"
#include "hecke/int128.hpp"

namespace hecke {

struct FiResult {
    u64 lhs = 0;       // d_r(n)
    double rhs = 0;    // majorant sum over divisors <= n^(1/m)
    bool holds = false;
};

// Lemma check: d_r(n) <= sum_{delta | n, delta^m <= n} (2 d(delta))^c
// with c = (r-1) m log m / log 2. The divisor cut uses the exact integer
// test delta^m <= n.
inline FiResult fi_majorant(u64 n, u32 r, u32 m) {
    if (n < 1) throw std::invalid_argument("fi_majorant: n must be >= 1");
    if (r < 2 || m < 2) throw std::invalid_argument("fi_majorant: need r, m >= 2");
    Factorization f = factor(i128(n));
    FiResult res;
    res.lhs = divisor_count_r(f, r);
    const double c = double(r - 1) * double(m) * std::log(double(m)) / std::log(2.0);
    for (u128 d : divisors(f)) {
        u128 pow_d = 1;
        bool small = true;
        for (u32 i = 0; i < m && small; ++i) {
            pow_d *= d;
            if (pow_d > n) small = false;
        }
        if (!small) continue;
        res.rhs += std::pow(2.0 * double(divisor_count(i128(d))), c);
    }
    res.holds = double(res.lhs) <= res.rhs;
    return res;
}

struct RankinResult {
    double lhs = 0;  // sum_{n <= x} b(n)
    double rhs = 0;  // x^u * sum_{n <= X} b(n) / n^u
    bool holds = false;
};

// Rankin's trick with the Dirichlet series truncated at X = b.size();
// truncation keeps the inequality valid because every n <= x term of the
// majorant is present.
inline RankinResult rankin_check(std::span<const double> b, u64 x, double u) {
    if (u <= 0) throw std::invalid_argument("rankin_check: u must be positive");
    if (x < 1 || x > b.size())
        throw std::invalid_argument("rankin_check: need 1 <= x <= X = b.size()");
    RankinResult res;
    double dsum = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] < 0) throw std::domain_error("rankin_check: coefficients must be nonnegative");
        double n = double(i + 1);
        if (i < x) res.lhs += b[i];
        dsum += b[i] / std::pow(n, u);
    }
    res.rhs = std::pow(double(x), u) * dsum;
    res.holds = res.lhs <= res.rhs;
    return res;
}

struct DiagRow {
    u64 z = 0;
    double c = 0;
    bool weighted = false;
    double sum = 0;         // sum_{n <= z} d(n)^c [h(n)]
    double comparator = 0;  // (log z)^(2^c), times z when unweighted
    double ratio = 0;
};

// Partial sums of d(n)^c h(n) (weighted) or d(n)^c against the paper-
// style comparators. Floating point; h(1) := 1 by convention.
inline DiagRow divisor_power_sum_diag(u64 z, double c, bool weighted) {
    if (z < 16) throw std::invalid_argument("divisor_power_sum_diag: z must be >= 16");
    const double two_c = std::pow(2.0, c);
    if (!std::isfinite(two_c) || two_c > 1e300)
        throw std::invalid_argument("divisor_power_sum_diag: c too large for floating point");

    // one smallest-prime-factor sieve gives d(n) and h(n) together
    std::vector<u32> spf(z + 1, 0);
    for (u64 i = 2; i <= z; ++i)
        if (spf[i] == 0)
            for (u64 j = i; j <= z; j += i)
                if (spf[j] == 0) spf[j] = u32(i);

    DiagRow row;
    row.z = z;
    row.c = c;
    row.weighted = weighted;
    for (u64 n = 1; n <= z; ++n) {
        u64 m = n, d = 1;
        double h = 1.0;
        while (m > 1) {
            u64 q = spf[m], e = 0;
            double lift = 1;
            while (m % q == 0) {
                m /= q;
                ++e;
                lift *= double(q);
            }
            lift /= double(q);  // q^(e-1)
            d *= (e + 1);
            h *= double(q) / (lift * (double(q) * double(q) - 1.0));
        }
        row.sum += std::pow(double(d), c) * (weighted ? h : 1.0);
    }
    const double logz = std::log(double(z));
    row.comparator = std::pow(logz, two_c) * (weighted ? 1.0 : double(z));
    row.ratio = row.sum / row.comparator;
    return row;
}

struct ExponentA {
    u32 k = 0;
    u32 m = 0;       // least integer with m > 7k
    double c = 0;    // m log m / log 2 = log2(A + 1)
};

// A = 2^c - 1 is astronomically large, so it is reported through
// log2(A + 1) = c.
inline ExponentA exponent_a(u32 k) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("exponent_a: k must be even and >= 2");
    ExponentA e;
    e.k = k;
    e.m = 7 * k + 1;
    e.c = double(e.m) * std::log(double(e.m)) / std::log(2.0);
    return e;
}

}  // namespace hecke
