// ecm.hpp
// Lenstra elliptic-curve factoring for odd composites above the Pollard
// rho sweet spot. Montgomery curves in XZ coordinates with the Suyama
// parametrization, stage 1 plus the standard stage-2 continuation
// (D = 210 wheel). Curve parameters follow a fixed sigma sequence, so
// factorizations are reproducible run to run.
//
// Typical inputs here are 70..120-bit cofactors of Fourier coefficients
// whose remaining prime factors are 35..60 bits; ECM finds those orders
// of magnitude faster than rho.
#pragma once

#include <deque>
#include <mutex>
#include <utility>
#include <vector>

#include "hecke/int128.hpp"
#include "hecke/modmath.hpp"
#include "hecke/primes.hpp"

namespace hecke::detail {

// Binary modular inverse for odd n. Returns {gcd(a, n), inv} with
// a * inv = 1 (mod n) when the gcd is 1.
struct InvResult {
    u128 g;
    u128 inv;
};

inline InvResult invmod_u128(u128 a, u128 n) {
    a %= n;
    if (a == 0) return {n, 0};
    u128 u = a, v = n;
    u128 x1 = 1, x2 = 0;
    while (u != 0) {
        while ((u & 1) == 0) {
            u >>= 1;
            x1 = (x1 & 1) ? (x1 + n) >> 1 : x1 >> 1;
        }
        if (u < v) {
            std::swap(u, v);
            std::swap(x1, x2);
        }
        u -= v;
        x1 = x1 >= x2 ? x1 - x2 : x1 + n - x2;
    }
    return {v, x2 % n};
}

struct EcmCurve {
    Montgomery128 mg;
    u128 a24 = 0;  // (A+2)/4 in Montgomery form

    explicit EcmCurve(u128 n) : mg(n) {}

    struct Pt {
        u128 X = 0, Z = 0;
    };

    Pt dbl(const Pt& p) const {
        u128 s = mg.add(p.X, p.Z);
        u128 d = mg.sub(p.X, p.Z);
        u128 s2 = mg.mul(s, s);
        u128 d2 = mg.mul(d, d);
        u128 e = mg.sub(s2, d2);
        return {mg.mul(s2, d2), mg.mul(e, mg.add(d2, mg.mul(a24, e)))};
    }

    // P + Q given P - Q; symmetric in P and Q.
    Pt add(const Pt& p, const Pt& q, const Pt& diff) const {
        u128 a = mg.mul(mg.sub(p.X, p.Z), mg.add(q.X, q.Z));
        u128 b = mg.mul(mg.add(p.X, p.Z), mg.sub(q.X, q.Z));
        u128 s = mg.add(a, b);
        u128 d = mg.sub(a, b);
        return {mg.mul(diff.Z, mg.mul(s, s)), mg.mul(diff.X, mg.mul(d, d))};
    }

    Pt ladder(const Pt& p, u64 k) const {  // [k]P, k >= 1
        if (k == 1) return p;
        Pt r0 = p, r1 = dbl(p);
        int top = 63 - __builtin_clzll(k);
        for (int i = top - 1; i >= 0; --i) {
            if ((k >> i) & 1) {
                r0 = add(r1, r0, p);
                r1 = dbl(r1);
            } else {
                r1 = add(r0, r1, p);
                r0 = dbl(r0);
            }
        }
        return r0;
    }
};

enum class CurveSetup { Ready, Skip, FactorFound };

// Suyama parametrization: u = sigma^2-5, v = 4 sigma, start (u^3 : v^3),
// a24 = (v-u)^3 (3u+v) / (16 u^3 v). The inversion can itself expose a
// factor of n.
inline CurveSetup ecm_setup(EcmCurve& curve, EcmCurve::Pt& p0, u64 sigma, u128* factor_out) {
    const Montgomery128& mg = curve.mg;
    const u128 n = mg.mod;
    u128 s = mg.to(u128(sigma));
    u128 u = mg.sub(mg.mul(s, s), mg.to(5));
    u128 v = mg.mul(mg.to(4), s);
    u128 u3 = mg.mul(u, mg.mul(u, u));
    u128 v3 = mg.mul(v, mg.mul(v, v));
    u128 vmu = mg.sub(v, u);
    u128 num = mg.mul(mg.mul(vmu, mg.mul(vmu, vmu)), mg.add(mg.mul(mg.to(3), u), v));
    u128 den = mg.mul(mg.to(16), mg.mul(u3, v));

    u128 den_plain = mg.from(den);
    if (den_plain == 0) return CurveSetup::Skip;
    InvResult inv = invmod_u128(den_plain, n);
    if (inv.g != 1) {
        if (inv.g == n) return CurveSetup::Skip;
        *factor_out = inv.g;
        return CurveSetup::FactorFound;
    }
    curve.a24 = mg.mul(num, mg.to(inv.inv));
    p0 = {u3, v3};
    return CurveSetup::Ready;
}

// Shared prime tables keyed by bound. Deque keeps references stable
// while new tiers are added concurrently.
inline const std::vector<u64>& ecm_primes_to(u64 bound) {
    static std::mutex mu;
    static std::deque<std::pair<u64, std::vector<u64>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (auto& [b, v] : cache)
        if (b == bound) return v;
    cache.emplace_back(bound, sieve_primes(bound).primes);
    return cache.back().second;
}

// One curve, stage 1 to b1 and stage 2 to b2. Returns a proper factor of
// n, or 0.
inline u128 ecm_one_curve(u128 n, u64 sigma, u64 b1, u64 b2) {
    EcmCurve curve{n};
    EcmCurve::Pt p;
    u128 found = 0;
    switch (ecm_setup(curve, p, sigma, &found)) {
        case CurveSetup::Skip: return 0;
        case CurveSetup::FactorFound: return found;
        case CurveSetup::Ready: break;
    }
    const Montgomery128& mg = curve.mg;
    const std::vector<u64>& primes = ecm_primes_to(b2);

    // stage 1: multiply by every prime power <= b1
    for (u64 q : primes) {
        if (q > b1) break;
        u64 qe = q;
        while (qe <= b1 / q) qe *= q;
        p = curve.ladder(p, qe);
    }
    u128 g = gcd_u128(mg.from(p.Z), n);
    if (g == n) return 0;
    if (g > 1) return g;

    // stage 2, standard continuation: primes q in (b1, b2], q = 210m +- j
    constexpr u64 D = 210;
    EcmCurve::Pt odd[105];  // odd[j] = [j]P for odd j
    odd[1] = p;
    EcmCurve::Pt p2 = curve.dbl(p);
    odd[3] = curve.add(p2, p, p);
    for (u64 j = 5; j < 105; j += 2) odd[j] = curve.add(odd[j - 2], p2, odd[j - 4]);

    u64 m0 = b1 / D;
    if (m0 == 0) m0 = 1;
    EcmCurve::Pt step = curve.ladder(p, D);
    EcmCurve::Pt r = curve.ladder(p, m0 * D);
    EcmCurve::Pt r_prev;
    bool prev_valid = m0 >= 2;
    if (prev_valid) r_prev = curve.ladder(p, (m0 - 1) * D);

    std::size_t pi = 0;
    while (pi < primes.size() && primes[pi] <= b1) ++pi;

    u128 acc = mg.one();
    for (u64 m = m0; m * D <= b2 + 104; ++m) {
        if (m > m0) {
            // r_prev invalid only when m0 = 1, where [2 m0 D] = dbl works
            EcmCurve::Pt next = prev_valid ? curve.add(r, step, r_prev) : curve.dbl(r);
            r_prev = r;
            r = next;
            prev_valid = true;
        }
        const u64 center = m * D;
        while (pi < primes.size() && primes[pi] + 104 < center) ++pi;
        for (std::size_t k = pi; k < primes.size(); ++k) {
            u64 q = primes[k];
            if (q > center + 104 || q > b2) break;
            u64 j = q > center ? q - center : center - q;
            if (j == 0 || j >= 105 || (j & 1) == 0) continue;
            if (j % 3 == 0 || j % 5 == 0 || j % 7 == 0) continue;
            u128 cross = mg.sub(mg.mul(r.X, odd[j].Z), mg.mul(odd[j].X, r.Z));
            acc = mg.mul(acc, cross);
        }
    }
    g = gcd_u128(mg.from(acc), n);
    if (g == n || g == 0) return 0;
    return g > 1 ? g : 0;
}

// Escalating deterministic schedule. n odd composite with no factor
// below 10^4; its smallest prime factor is below 2^64 (n < 2^127),
// well within the later tiers. Returns 0 if every tier strikes out
// (callers fall back to rho).
inline u128 ecm_factor(u128 n) {
    struct Tier {
        u64 b1;
        u64 curves;
    };
    constexpr Tier tiers[] = {{2'000, 25},    {11'000, 40},     {50'000, 80},
                              {250'000, 160}, {1'000'000, 320}, {4'000'000, 640}};
    u64 sigma = 6;
    for (const Tier& tier : tiers) {
        for (u64 i = 0; i < tier.curves; ++i, ++sigma) {
            u128 g = ecm_one_curve(n, sigma, tier.b1, 100 * tier.b1);
            if (g > 1 && g < n) return g;
        }
    }
    return 0;
}

}  // namespace hecke::detail
