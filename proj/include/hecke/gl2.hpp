// gl2.hpp
// Exact censuses of GL2(Z/l^n Z) subsets for odd primes l: the full group
// B, the trace-zero slice A, the (k-1)-th-power-determinant subgroup C and
// its trace-zero slice D. Closed-form counts sit next to an exhaustive
// enumerator so every formula can be checked against brute force. The
// density h(delta) = |D|/|C| is what the Chebotarev experiments consume.
#pragma once

#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hecke/errors.hpp"
#include "hecke/int128.hpp"
#include "hecke/modmath.hpp"
#include "hecke/parallel.hpp"

namespace hecke {

struct CensusParams {
    u64 ell;  // odd prime
    u32 n;    // prime-power exponent, >= 1
    u32 k;    // even weight, >= 2
    u64 d;    // gcd(ell - 1, k - 1), always odd

    static CensusParams make(u64 ell, u32 n, u32 k) {
        if (ell == 2) throw std::invalid_argument("census: ell = 2 unsupported (odd primes only)");
        if (ell < 3 || !is_probable_prime(ell))
            throw std::invalid_argument("census: ell must be an odd prime");
        if (n < 1) throw std::invalid_argument("census: n must be >= 1");
        if (k < 2 || k % 2 != 0) throw std::invalid_argument("census: k must be even and >= 2");
        return CensusParams{ell, n, k, std::gcd(ell - 1, u64(k - 1))};
    }
};

struct Census {
    u128 order_B = 0;  // |GL2(Z/l^n)|
    u128 count_A = 0;  // trace = 0
    u128 count_C = 0;  // det a (k-1)-th power mod l
    u128 count_D = 0;  // both

    bool operator==(const Census&) const = default;
};

// Closed forms: |B| = l^{4(n-1)} (l^2-1)(l^2-l), |A| = l^{3(n-1)} l^2 (l-1),
// |C| = |B|/d, |D| = |A|/d with d = gcd(l-1, k-1).
inline Census census_formula(const CensusParams& p) {
    auto checked_mul = [](u128 a, u128 b) {
        u128 r;
        if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("census_formula: overflow");
        return r;
    };
    u128 ell = p.ell;
    u128 lift4 = 1, lift3 = 1;
    for (u32 i = 1; i < p.n; ++i) {
        for (int j = 0; j < 4; ++j) lift4 = checked_mul(lift4, ell);
        for (int j = 0; j < 3; ++j) lift3 = checked_mul(lift3, ell);
    }
    Census c;
    c.order_B = checked_mul(lift4, (ell * ell - 1) * (ell * ell - ell));
    c.count_A = checked_mul(lift3, ell * ell * (ell - 1));
    c.count_C = c.order_B / p.d;  // d | (l-1) | both factors
    c.count_D = c.count_A / p.d;
    return c;
}

// Exhaustive enumeration of all (l^n)^4 matrices. l = 2 is accepted here
// (exploratory; no closed form asserted against it).
inline Census census_brute(u64 ell, u32 n, u32 k, unsigned threads = 1) {
    if (ell < 2 || !is_probable_prime(ell))
        throw std::invalid_argument("census_brute: ell must be prime");
    if (n < 1 || k < 2 || k % 2 != 0)
        throw std::invalid_argument("census_brute: need n >= 1 and even k >= 2");
    u64 m = 1;
    for (u32 i = 0; i < n; ++i) {
        m *= ell;
        if (m > 125) throw CapacityError("census_brute: l^n must be <= 125");
    }

    // (k-1)-th powers in F_l^*
    std::vector<char> is_pow(ell, 0);
    for (u64 w = 1; w < ell; ++w) is_pow[powmod(w, k - 1, ell)] = 1;

    const u64 m2 = m * m;
    std::vector<Census> partial(resolve_threads(threads));
    for_each_block(m2, threads, [&](std::size_t blk, std::size_t begin, std::size_t end) {
        Census local;
        for (std::size_t ab = begin; ab < end; ++ab) {
            const u64 a = u64(ab) / m, b = u64(ab) % m;
            for (u64 c = 0; c < m; ++c) {
                const u64 bc = b * c % m;
                for (u64 dd = 0; dd < m; ++dd) {
                    const u64 det = (a * dd % m + m - bc) % m;
                    if (det % ell == 0) continue;  // not a unit
                    local.order_B += 1;
                    const bool tr0 = (a + dd) % m == 0;
                    if (tr0) local.count_A += 1;
                    if (is_pow[det % ell]) {
                        local.count_C += 1;
                        if (tr0) local.count_D += 1;
                    }
                }
            }
        }
        partial[blk] = local;
    });
    Census total;
    for (const Census& c : partial) {
        total.order_B += c.order_B;
        total.count_A += c.count_A;
        total.count_C += c.count_C;
        total.count_D += c.count_D;
    }
    return total;
}

// Least quadratic nonresidue mod an odd prime.
inline u64 least_nonresidue(u64 ell) {
    for (u64 a = 2; a < ell; ++a)
        if (powmod(a, (ell - 1) / 2, ell) == ell - 1) return a;
    throw std::logic_error("least_nonresidue: none found");
}

struct ClassSizeReport {
    u64 ell = 0;
    // conjugacy orbit sizes: central, non-semisimple, split, non-split
    std::array<u64, 4> sizes{};
    std::array<u64, 4> expected{};
    std::array<u64, 4> class_counts{};  // number of classes of each type
    u128 partition_total = 0;           // sum sizes * counts
    u128 group_order = 0;
    bool ok = false;
};

// Orbit sizes under conjugation for one representative of each class
// type, plus the partition check sum(size * count) = |GL2(F_l)|.
inline ClassSizeReport class_size_check(u64 ell) {
    if (ell < 3 || ell > 13 || !is_probable_prime(ell))
        throw std::invalid_argument("class_size_check: ell must be an odd prime <= 13");

    const u64 eps = least_nonresidue(ell);
    using Mat = std::array<u64, 4>;  // row-major a b c d
    auto mul = [&](const Mat& x, const Mat& y) {
        return Mat{(x[0] * y[0] + x[1] * y[2]) % ell, (x[0] * y[1] + x[1] * y[3]) % ell,
                   (x[2] * y[0] + x[3] * y[2]) % ell, (x[2] * y[1] + x[3] * y[3]) % ell};
    };
    auto orbit_size = [&](const Mat& rep) {
        std::vector<char> seen(ell * ell * ell * ell, 0);
        u64 count = 0;
        for (u64 a = 0; a < ell; ++a)
            for (u64 b = 0; b < ell; ++b)
                for (u64 c = 0; c < ell; ++c)
                    for (u64 d = 0; d < ell; ++d) {
                        const u64 det = (a * d % ell + ell - b * c % ell) % ell;
                        if (det == 0) continue;
                        const u64 inv = powmod(det, ell - 2, ell);
                        const Mat g{a, b, c, d};
                        const Mat ginv{d * inv % ell, (ell - b % ell) % ell * inv % ell,
                                       (ell - c % ell) % ell * inv % ell, a * inv % ell};
                        const Mat conj = mul(mul(g, rep), ginv);
                        u64 key = ((conj[0] * ell + conj[1]) * ell + conj[2]) * ell + conj[3];
                        if (!seen[key]) {
                            seen[key] = 1;
                            ++count;
                        }
                    }
        return count;
    };

    ClassSizeReport r;
    r.ell = ell;
    r.sizes[0] = orbit_size({1, 0, 0, 1});           // central
    r.sizes[1] = orbit_size({1, 1, 0, 1});           // non-semisimple
    r.sizes[2] = orbit_size({1, 0, 0, 2});           // split semisimple, a != delta
    r.sizes[3] = orbit_size({0, eps % ell, 1, 0});   // non-split semisimple
    r.expected = {1, ell * ell - 1, ell * ell + ell, ell * ell - ell};
    r.class_counts = {ell - 1, ell - 1, (ell - 1) * (ell - 2) / 2, ell * (ell - 1) / 2};
    r.group_order = u128(ell * ell - 1) * (ell * ell - ell);
    r.partition_total = 0;
    for (int i = 0; i < 4; ++i) r.partition_total += u128(r.sizes[i]) * r.class_counts[i];
    r.ok = r.sizes == r.expected && r.partition_total == r.group_order;
    return r;
}

enum class CongruenceVariant { MinusSquare, MinusEpsSquare };

// Number of unordered pairs {a, -a} in F_l^* with -a^2 (resp. -eps a^2)
// a (k-1)-th power; equals (l-1)/(2d) for every even k.
inline u64 congruence_pair_count(u64 ell, u32 k, CongruenceVariant variant) {
    if (ell < 3 || !is_probable_prime(ell))
        throw std::invalid_argument("congruence_pair_count: ell must be an odd prime");
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("congruence_pair_count: k must be even and >= 2");
    std::vector<char> is_pow(ell, 0);
    for (u64 w = 1; w < ell; ++w) is_pow[powmod(w, k - 1, ell)] = 1;
    const u64 eps = variant == CongruenceVariant::MinusEpsSquare ? least_nonresidue(ell) : 1;
    u64 hits = 0;
    for (u64 a = 1; a < ell; ++a) {
        u64 v = mulmod(mulmod(a, a, ell), eps, ell);
        v = (ell - v) % ell;  // -e a^2 mod l, never 0
        if (is_pow[v]) ++hits;
    }
    return hits / 2;  // a and -a are distinct and paired
}

struct DensityValue {
    u128 num = 0;
    u128 den = 1;

    bool operator==(const DensityValue&) const = default;
    double value() const { return double(num) / double(den); }
};

// h(delta) = prod over l^n || delta of l / (l^{n-1} (l^2 - 1)), reduced.
// The formula is exact when every prime factor has full image; for small
// or exceptional primes it is only the generic upper-bound value, and the
// statistics layer flags those moduli.
inline DensityValue density_h(u64 delta) {
    if (delta < 2) throw std::domain_error("density_h: delta must be >= 2");
    auto checked_mul = [](u128 a, u128 b) {
        u128 r;
        if (__builtin_mul_overflow(a, b, &r))
            throw CapacityError("density_h: rational overflows 128 bits");
        return r;
    };
    DensityValue h{1, 1};
    u64 rest = delta;
    for (u64 l = 2; l * l <= rest; ++l) {
        if (rest % l) continue;
        u128 lift = 1;
        while (rest % l == 0) {
            rest /= l;
            lift = checked_mul(lift, l);
        }
        lift /= l;  // l^{n-1}
        h.num = checked_mul(h.num, l);
        h.den = checked_mul(h.den, checked_mul(lift, u128(l) * l - 1));
    }
    if (rest > 1) {
        h.num = checked_mul(h.num, rest);
        h.den = checked_mul(h.den, u128(rest) * rest - 1);
    }
    u128 g = gcd_u128(h.num, h.den);
    h.num /= g;
    h.den /= g;
    return h;
}

}  // namespace hecke
