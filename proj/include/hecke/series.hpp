// series.hpp
// Dense integer power series with exact multiplication: NTT over a fixed
// list of word-size primes, CRT recombination back to signed 128-bit
// coefficients. This is what produces the q-expansion of Delta.
//
// Conventions: coeffs[i] is the coefficient of q^i. A multiplication
// truncated at degree_cap keeps coefficients of q^0 .. q^degree_cap.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hecke/errors.hpp"
#include "hecke/int128.hpp"
#include "hecke/modmath.hpp"
#include "hecke/parallel.hpp"
#include "hecke/wide_uint.hpp"

namespace hecke {

struct NttPrime {
    u64 mod;   // prime, = 1 mod 2^26, just below 2^62
    u64 root;  // primitive root of (Z/mod)^*
};

// Largest eight primes below 2^62 with 2-adic valuation of p-1 at least 26.
// Transforms of length up to 2^26 are supported; every prime contributes
// 61+ bits to the CRT modulus.
inline constexpr std::array<NttPrime, 8> kNttPrimes = {{
    {4611686017554972673ull, 5},
    {4611686015004835841ull, 3},
    {4611686009971671041ull, 6},
    {4611686007555751937ull, 3},
    {4611686007488643073ull, 5},
    {4611686007085989889ull, 22},
    {4611686005878030337ull, 5},
    {4611686004066091009ull, 13},
}};

inline constexpr u64 kMaxTransformSize = u64(1) << 26;

// Integer power series with signed coefficients of magnitude < 2^127.
class IntSeries {
public:
    IntSeries() = default;

    explicit IntSeries(std::vector<i128> coeffs) : c_(std::move(coeffs)) {
        for (i128 v : c_)
            if (v == I128_MIN)
                throw std::overflow_error("IntSeries: coefficient magnitude must be < 2^127");
    }

    static IntSeries zeros(std::size_t n) { return IntSeries(std::vector<i128>(n, 0)); }

    std::size_t size() const { return c_.size(); }
    bool empty() const { return c_.empty(); }
    i128 operator[](std::size_t i) const { return c_[i]; }
    const std::vector<i128>& coeffs() const { return c_; }

private:
    std::vector<i128> c_;
};

// Residues of an IntSeries modulo one NTT prime.
struct ModSeries {
    u64 modulus = 0;
    std::vector<u64> coeffs;  // each in [0, modulus)

    static ModSeries reduce(std::span<const i128> src, u64 modulus) {
        ModSeries out;
        out.modulus = modulus;
        out.coeffs.resize(src.size());
        const i64 m = i64(modulus);
        for (std::size_t i = 0; i < src.size(); ++i) {
            i64 r = i64(src[i] % m);
            if (r < 0) r += m;
            out.coeffs[i] = u64(r);
        }
        return out;
    }
};

namespace ntt {

inline void bit_reverse(std::vector<u64>& a) {
    std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

// In-place transform of power-of-two length; values in Montgomery form.
// root is a primitive root of the full multiplicative group; the level
// roots g^((p-1)/len) all exist because len divides p-1.
inline void transform(std::vector<u64>& a, const Montgomery64& mg, u64 root, bool invert) {
    const std::size_t n = a.size();
    const u64 p = mg.mod;
    u64 w_base = invert ? powmod(root, p - 2, p) : root;
    bit_reverse(a);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        u64 wlen = mg.to(powmod(w_base, (p - 1) / len, p));
        for (std::size_t i = 0; i < n; i += len) {
            u64 w = mg.one();
            for (std::size_t j = 0; j < len / 2; ++j) {
                u64 u = a[i + j];
                u64 v = mg.mul(a[i + j + len / 2], w);
                a[i + j] = mg.add(u, v);
                a[i + j + len / 2] = mg.sub(u, v);
                w = mg.mul(w, wlen);
            }
        }
    }
    if (invert) {
        u64 n_inv = mg.to(powmod(u64(n) % p, p - 2, p));
        for (u64& x : a) x = mg.mul(x, n_inv);
    }
}

// Cyclic product of the two residue vectors, truncated to out_len.
inline std::vector<u64> multiply(const ModSeries& a, const ModSeries& b, u64 root,
                                 std::size_t out_len) {
    const Montgomery64 mg{a.modulus};
    std::size_t need = a.coeffs.size() + b.coeffs.size() - 1;
    std::size_t n = 1;
    while (n < need) n <<= 1;

    std::vector<u64> fa(n, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) fa[i] = mg.to(a.coeffs[i]);
    const bool square = &a == &b;
    std::vector<u64> fb;
    if (!square) {
        fb.assign(n, 0);
        for (std::size_t i = 0; i < b.coeffs.size(); ++i) fb[i] = mg.to(b.coeffs[i]);
    }

    transform(fa, mg, root, false);
    if (!square) transform(fb, mg, root, false);
    const std::vector<u64>& other = square ? fa : fb;
    for (std::size_t i = 0; i < n; ++i) fa[i] = mg.mul(fa[i], other[i]);
    transform(fa, mg, root, true);

    std::vector<u64> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = i < n ? mg.from(fa[i]) : 0;
    return out;
}

}  // namespace ntt

namespace detail {

using CrtWide = WideUInt<8>;

inline std::vector<i128> schoolbook_multiply(std::span<const i128> a, std::span<const i128> b,
                                             std::size_t out_len) {
    std::vector<i128> out(out_len, 0);
    for (std::size_t i = 0; i < a.size() && i < out_len; ++i) {
        if (a[i] == 0) continue;
        std::size_t jmax = std::min(b.size(), out_len - i);
        for (std::size_t j = 0; j < jmax; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace detail

// Exact truncated product over an explicit modulus list. poly_multiply
// forwards kNttPrimes here; tests shrink the list to exercise the
// capacity check.
inline IntSeries poly_multiply_with_moduli(const IntSeries& a, const IntSeries& b, u64 degree_cap,
                                           std::span<const NttPrime> moduli, unsigned threads = 1) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("poly_multiply: inputs must be nonempty");

    const std::size_t la = std::min<std::size_t>(a.size(), degree_cap + 1);
    const std::size_t lb = std::min<std::size_t>(b.size(), degree_cap + 1);
    std::span<const i128> av(a.coeffs().data(), la);
    std::span<const i128> bv(b.coeffs().data(), lb);
    const std::size_t out_len = std::min<u64>(la + lb - 1, degree_cap + 1);

    u128 max_a = 0, max_b = 0;
    for (i128 v : av) max_a = std::max(max_a, abs_u128(v));
    for (i128 v : bv) max_b = std::max(max_b, abs_u128(v));
    if (max_a == 0 || max_b == 0) return IntSeries::zeros(out_len);

    // |product coeff| <= min(la, lb) * max|a| * max|b|
    const int bound_bits = bit_width_u128(u128(std::min(la, lb))) + bit_width_u128(max_a) +
                           bit_width_u128(max_b);

    if (std::min(la, lb) <= 64 && bound_bits <= 126)
        return IntSeries(detail::schoolbook_multiply(av, bv, out_len));

    // Each modulus contributes > 61 bits; one spare on top of the cover.
    std::size_t k_needed = std::size_t((bound_bits + 1 + 60) / 61) + 1;
    if (k_needed > moduli.size())
        throw CapacityError("poly_multiply: coefficient bound exceeds CRT capacity");
    const std::size_t K = k_needed;

    std::size_t need = la + lb - 1;
    std::size_t nsize = 1;
    while (nsize < need) nsize <<= 1;
    if (nsize > kMaxTransformSize)
        throw CapacityError("poly_multiply: transform size exceeds supported maximum");

    // per-modulus products, computed concurrently
    std::vector<std::vector<u64>> residues(K);
    for_each_block(K, threads, [&](std::size_t, std::size_t mbegin, std::size_t mend) {
        for (std::size_t mi = mbegin; mi < mend; ++mi) {
            const auto [p, root] = moduli[mi];
            ModSeries ra = ModSeries::reduce(av, p);
            if (&a == &b) {
                residues[mi] = ntt::multiply(ra, ra, root, out_len);
            } else {
                ModSeries rb = ModSeries::reduce(bv, p);
                residues[mi] = ntt::multiply(ra, rb, root, out_len);
            }
        }
    });

    // Garner precomputation: inv[i][j] = p_i^-1 mod p_j for i < j
    std::vector<std::array<u64, 8>> inv(K);
    for (std::size_t j = 1; j < K; ++j)
        for (std::size_t i = 0; i < j; ++i)
            inv[j][i] = powmod(moduli[i].mod % moduli[j].mod, moduli[j].mod - 2, moduli[j].mod);

    detail::CrtWide prod = detail::CrtWide::from_u64(1);
    for (std::size_t i = 0; i < K; ++i) prod.mul_u64(moduli[i].mod);
    detail::CrtWide half = prod;
    half.shr1();

    std::vector<i128> out(out_len);
    for_each_block(out_len, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::array<u64, 8> digit{};
        for (std::size_t t = begin; t < end; ++t) {
            for (std::size_t j = 0; j < K; ++j) {
                u64 pj = moduli[j].mod;
                u64 x = residues[j][t];
                for (std::size_t i = 0; i < j; ++i) {
                    u64 di = digit[i] % pj;
                    u64 diff = x >= di ? x - di : x + pj - di;
                    x = mulmod(diff, inv[j][i], pj);
                }
                digit[j] = x;
            }
            detail::CrtWide acc = detail::CrtWide::from_u64(digit[K - 1]);
            for (std::size_t i = K - 1; i-- > 0;) {
                acc.mul_u64(moduli[i].mod);
                acc.add_u64(digit[i]);
            }
            bool negative = acc > half;
            if (negative) {
                detail::CrtWide mag = prod;
                mag -= acc;
                acc = mag;
            }
            if (!acc.fits_u128() || (acc.to_u128() >> 127))
                throw std::overflow_error("poly_multiply: result coefficient exceeds 2^127");
            u128 mag = acc.to_u128();
            out[t] = negative ? -i128(mag) : i128(mag);
        }
    });
    return IntSeries(std::move(out));
}

// Product of a and b truncated at degree_cap; equals schoolbook
// multiplication exactly.
inline IntSeries poly_multiply(const IntSeries& a, const IntSeries& b, u64 degree_cap,
                               unsigned threads = 1) {
    return poly_multiply_with_moduli(a, b, degree_cap,
                                     std::span<const NttPrime>(kNttPrimes), threads);
}

inline constexpr u64 kDeltaMaxDegree = 8'000'000;  // |tau(n)| <= d(n) n^{11/2} < 2^127 here

// tau(1..degree) as a series with coeffs[n] = tau(n), coeffs[0] = 0.
// Delta = q prod (1-q^n)^24; the product is the 8th power of
// prod (1-q^n)^3 = sum_m (-1)^m (2m+1) q^{m(m+1)/2}, done as three
// squarings truncated at q^(degree-1).
inline IntSeries delta_q_expansion(u64 degree, unsigned threads = 1) {
    if (degree < 1) throw std::invalid_argument("delta_q_expansion: degree must be >= 1");
    if (degree > kDeltaMaxDegree)
        throw CapacityError("delta_q_expansion: degree exceeds 128-bit coefficient validity bound");

    std::vector<i128> jac(degree, 0);
    for (u64 m = 0;; ++m) {
        u64 idx = m * (m + 1) / 2;
        if (idx >= degree) break;
        i128 v = i128(2 * m + 1);
        jac[idx] = (m & 1) ? -v : v;
    }
    IntSeries cube(std::move(jac));

    const u64 cap = degree - 1;
    IntSeries sixth = poly_multiply(cube, cube, cap, threads);
    IntSeries twelfth = poly_multiply(sixth, sixth, cap, threads);
    IntSeries full = poly_multiply(twelfth, twelfth, cap, threads);

    std::vector<i128> tau(degree + 1, 0);
    for (u64 n = 1; n <= degree; ++n) tau[n] = (n - 1) < full.size() ? full[n - 1] : 0;
    return IntSeries(std::move(tau));
}

}  // namespace hecke
