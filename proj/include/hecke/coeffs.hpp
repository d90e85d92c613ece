// coeffs.hpp
// Eigenform descriptions and their prime-indexed coefficient tables.
// Two families are shipped: Delta (weight 12, level 1, coefficients
// tau(p) from the q-expansion) and rational elliptic curves (weight 2,
// a_p from point counts). Tables persist in a checksummed binary format.
#pragma once

#include <algorithm>
#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hecke/arith.hpp"
#include "hecke/errors.hpp"
#include "hecke/int128.hpp"
#include "hecke/parallel.hpp"
#include "hecke/primes.hpp"
#include "hecke/series.hpp"
#include "hecke/wide_uint.hpp"

namespace hecke {

class ExcludedPrimeError : public std::runtime_error {
public:
    explicit ExcludedPrimeError(const std::string& what) : std::runtime_error(what) {}
};

class TableFormatError : public std::runtime_error {
public:
    explicit TableFormatError(const std::string& what) : std::runtime_error(what) {}
};
class TableVersionError : public TableFormatError {
public:
    explicit TableVersionError(const std::string& what) : TableFormatError(what) {}
};
class TableChecksumError : public TableFormatError {
public:
    explicit TableChecksumError(const std::string& what) : TableFormatError(what) {}
};
class TableBoundError : public TableFormatError {
public:
    explicit TableBoundError(const std::string& what) : TableFormatError(what) {}
};

enum class FormKind { Delta, EllipticCurve };

// Weierstrass coefficients are capped so that every intermediate of the
// discriminant (degree 8 in the a_i) stays inside i128.
inline constexpr i64 kMaxWeierstrassCoeff = 10'000;

struct FormSpec {
    FormKind kind = FormKind::Delta;
    std::array<i64, 5> weierstrass{};  // a1, a2, a3, a4, a6 (curve case)
    u32 weight = 12;
    u64 level = 1;  // curves: product of the distinct bad primes
    bool trivial_nebentypus = true;
    bool cm = false;
    std::vector<u64> exceptional_primes;  // mod-l image not full; sorted

    static FormSpec delta() {
        FormSpec f;
        f.kind = FormKind::Delta;
        f.weight = 12;
        f.level = 1;
        f.cm = false;
        f.exceptional_primes = {2, 3, 5, 7, 23, 691};
        return f;
    }

    static FormSpec elliptic_curve(const std::array<i64, 5>& a);

    i128 discriminant() const {
        auto [a1, a2, a3, a4, a6] = weierstrass;
        i128 b2 = i128(a1) * a1 + 4 * i128(a2);
        i128 b4 = 2 * i128(a4) + i128(a1) * a3;
        i128 b6 = i128(a3) * a3 + 4 * i128(a6);
        i128 b8 = i128(a1) * a1 * a6 + 4 * i128(a2) * a6 - i128(a1) * a3 * a4 +
                  i128(a2) * a3 * a3 - i128(a4) * a4;
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    }

    std::string descriptor() const {
        if (kind == FormKind::Delta) return "delta";
        std::string s = "ec:";
        for (std::size_t i = 0; i < 5; ++i) {
            if (i) s += ',';
            s += std::to_string(weierstrass[i]);
        }
        return s;
    }
};

namespace detail {

// The thirteen rational CM j-invariants (orders of class number one).
inline constexpr i128 kCmJInvariants[] = {0,
                                          1728,
                                          -3375,
                                          8000,
                                          -32768,
                                          54000,
                                          287496,
                                          -884736,
                                          -12288000,
                                          16581375,
                                          -884736000ll,
                                          -147197952000ll,
                                          -262537412640768000ll};

inline WideUInt<8> wide_mul_u128(WideUInt<8> x, u128 m) {
    WideUInt<8> low = x;
    low.mul_u64(u64(m));
    WideUInt<8> high = x;
    high.mul_u64(u64(m >> 64));
    if (high.w[7]) throw std::overflow_error("wide_mul_u128: overflow");
    WideUInt<8> shifted{};
    for (int i = 7; i >= 1; --i) shifted.w[i] = high.w[i - 1];
    low += shifted;
    return low;
}

}  // namespace detail

inline FormSpec parse_form(std::string_view text);

// a_p = p + 1 - #E(F_p) for a good prime p. p = 2, 3 count points of the
// long model directly; p > 3 goes through the short model
// y^2 = x^3 - 27 c4 x - 54 c6 and one quadratic-character sweep, O(p).
inline i64 ec_trace(const FormSpec& curve, u64 p) {
    if (curve.kind != FormKind::EllipticCurve)
        throw std::invalid_argument("ec_trace: form is not an elliptic curve");
    if (abs_u128(curve.discriminant()) % p == 0)
        throw ExcludedPrimeError("ec_trace: p = " + std::to_string(p) +
                                 " divides the discriminant");

    auto [a1, a2, a3, a4, a6] = curve.weierstrass;
    if (p <= 3) {
        auto red = [&](i64 v) { return u64(((v % i64(p)) + i64(p)) % i64(p)); };
        u64 count = 1;  // point at infinity
        for (u64 x = 0; x < p; ++x)
            for (u64 y = 0; y < p; ++y) {
                u64 lhs = (y * y + red(a1) * x * y + red(a3) * y) % p;
                u64 rhs = (x * x * x + red(a2) * x * x + red(a4) * x + red(a6)) % p;
                if (lhs == rhs) ++count;
            }
        return i64(p) + 1 - i64(count);
    }

    i128 b2 = i128(a1) * a1 + 4 * i128(a2);
    i128 b4 = 2 * i128(a4) + i128(a1) * a3;
    i128 b6 = i128(a3) * a3 + 4 * i128(a6);
    i128 c4 = b2 * b2 - 24 * b4;
    i128 c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    const i128 pm = i128(p);
    u64 A = u64((((-27 * c4) % pm) + pm) % pm);
    u64 B = u64((((-54 * c6) % pm) + pm) % pm);

    // quadratic residue table: qr[t] = +1 square, -1 non-square, 0 zero
    std::vector<signed char> qr(p, -1);
    qr[0] = 0;
    for (u64 y = 1; y <= (p - 1) / 2; ++y) qr[mulmod(y, y, p)] = 1;

    i64 sum = 0;  // a_p = -sum_x chi(x^3 + Ax + B)
    for (u64 x = 0; x < p; ++x) {
        u64 t = (mulmod(mulmod(x, x, p), x, p) + mulmod(A, x, p)) % p;
        t = (t + B) % p;
        sum += qr[t];
    }
    return -sum;
}

struct CoefficientTable {
    FormSpec form;
    u64 x_max = 0;
    std::vector<std::pair<u64, i128>> entries;  // (p, a(p)), p ascending, good primes only
    std::vector<u64> excluded_primes;           // bad reduction, sorted

    // number of good primes <= x
    u64 good_prime_count(u64 x) const {
        auto it = std::upper_bound(entries.begin(), entries.end(), x,
                                   [](u64 v, const auto& e) { return v < e.first; });
        return u64(it - entries.begin());
    }
};

// Exact check |a(p)|^2 <= 4 p^(k-1), in 512-bit arithmetic.
inline bool deligne_bound_holds(u64 p, i128 a, u32 weight) {
    u128 mag = abs_u128(a);
    u64 a0 = u64(mag), a1 = u64(mag >> 64);
    u128 p00 = u128(a0) * a0;
    u128 p01 = u128(a0) * a1;
    u128 p11 = u128(a1) * a1;
    WideUInt<8> sq = WideUInt<8>::from_u128(p00);  // a^2 = p00 + 2 p01 2^64 + p11 2^128
    WideUInt<8> mid = WideUInt<8>::from_u128(p01);
    mid.mul_u64(2);
    WideUInt<8> shifted{};
    shifted.w[1] = mid.w[0];
    shifted.w[2] = mid.w[1];
    shifted.w[3] = mid.w[2];
    sq += shifted;
    WideUInt<8> high{};
    high.w[2] = u64(p11);
    high.w[3] = u64(p11 >> 64);
    sq += high;

    WideUInt<8> rhs = WideUInt<8>::from_u64(4);
    for (u32 i = 0; i + 1 < weight; ++i) rhs.mul_u64(p);
    return sq <= rhs;
}

// Builds the table of a(p) for all good primes p <= x_max. Partitions of
// the prime range merge in block order, so the result is independent of
// the worker count.
inline CoefficientTable build_table(const FormSpec& form, u64 x_max, unsigned threads = 1) {
    if (x_max < 2) throw std::invalid_argument("build_table: x_max must be >= 2");
    CoefficientTable t;
    t.form = form;
    t.x_max = x_max;

    if (form.kind == FormKind::Delta) {
        IntSeries tau = delta_q_expansion(x_max, threads);  // enforces the 8e6 cap
        PrimeTable pt = sieve_primes(x_max);
        t.entries.reserve(pt.primes.size());
        for (u64 p : pt.primes) t.entries.emplace_back(p, tau[p]);
    } else {
        Factorization df = factor(form.discriminant());
        for (auto [p, e] : df.prime_powers) t.excluded_primes.push_back(u64(p));
        std::sort(t.excluded_primes.begin(), t.excluded_primes.end());

        PrimeTable pt = sieve_primes(x_max);
        std::vector<u64> good;
        good.reserve(pt.primes.size());
        for (u64 p : pt.primes)
            if (!std::binary_search(t.excluded_primes.begin(), t.excluded_primes.end(), p))
                good.push_back(p);

        std::vector<std::vector<std::pair<u64, i128>>> blocks(resolve_threads(threads));
        for_each_block(good.size(), threads,
                       [&](std::size_t blk, std::size_t begin, std::size_t end) {
                           auto& out = blocks[blk];
                           out.reserve(end - begin);
                           for (std::size_t i = begin; i < end; ++i)
                               out.emplace_back(good[i], i128(ec_trace(form, good[i])));
                       });
        for (auto& b : blocks) t.entries.insert(t.entries.end(), b.begin(), b.end());
    }

    for (auto [p, a] : t.entries)
        if (!deligne_bound_holds(p, a, form.weight))
            throw std::logic_error("build_table: coefficient bound violated (internal error)");
    return t;
}

// ---------------------------------------------------------------------
// Table file format "HDTB", version 1, little-endian:
//   magic[4] | version u16 | descriptor (u16 length + UTF-8 bytes)
//   | k u16 | N u64 | x_max u64 | excluded count u16 + u64 each
//   | record count u64 | records (p u64, a(p) 16-byte two's complement)
//   | CRC32 (IEEE 802.3) of all preceding bytes, u32
// ---------------------------------------------------------------------

namespace detail {

inline u32 crc32_ieee(std::span<const unsigned char> data) {
    static const auto table = [] {
        std::array<u32, 256> t{};
        for (u32 i = 0; i < 256; ++i) {
            u32 c = i;
            for (int b = 0; b < 8; ++b) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1)));
            t[i] = c;
        }
        return t;
    }();
    u32 crc = 0xFFFFFFFFu;
    for (unsigned char byte : data) crc = (crc >> 8) ^ table[(crc ^ byte) & 0xFF];
    return ~crc;
}

struct ByteWriter {
    std::vector<unsigned char> bytes;
    void u16le(std::uint16_t v) {
        bytes.push_back(v & 0xFF);
        bytes.push_back(v >> 8);
    }
    void u32le(u32 v) {
        for (int i = 0; i < 4; ++i) bytes.push_back((v >> (8 * i)) & 0xFF);
    }
    void u64le(u64 v) {
        for (int i = 0; i < 8; ++i) bytes.push_back((v >> (8 * i)) & 0xFF);
    }
    void i128le(i128 v) {
        u128 u = u128(v);  // two's complement
        for (int i = 0; i < 16; ++i) bytes.push_back(u64(u >> (8 * i)) & 0xFF);
    }
    void raw(std::string_view s) { bytes.insert(bytes.end(), s.begin(), s.end()); }
};

struct ByteReader {
    std::span<const unsigned char> bytes;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > bytes.size()) throw TableFormatError("table file truncated");
    }
    std::uint16_t u16le() {
        need(2);
        auto v = std::uint16_t(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }
    u32 u32le() {
        need(4);
        u32 v = 0;
        for (int i = 0; i < 4; ++i) v |= u32(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    u64 u64le() {
        need(8);
        u64 v = 0;
        for (int i = 0; i < 8; ++i) v |= u64(bytes[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    i128 i128le() {
        need(16);
        u128 v = 0;
        for (int i = 0; i < 16; ++i) v |= u128(bytes[pos + i]) << (8 * i);
        pos += 16;
        return i128(v);
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
        pos += n;
        return s;
    }
};

}  // namespace detail

inline void save_table(const CoefficientTable& t, const std::filesystem::path& path) {
    detail::ByteWriter w;
    w.raw("HDTB");
    w.u16le(1);
    std::string desc = t.form.descriptor();
    w.u16le(std::uint16_t(desc.size()));
    w.raw(desc);
    w.u16le(std::uint16_t(t.form.weight));
    w.u64le(t.form.level);
    w.u64le(t.x_max);
    if (t.excluded_primes.size() > 0xFFFF)
        throw std::invalid_argument("save_table: too many excluded primes");
    w.u16le(std::uint16_t(t.excluded_primes.size()));
    for (u64 p : t.excluded_primes) w.u64le(p);
    w.u64le(t.entries.size());
    for (auto [p, a] : t.entries) {
        w.u64le(p);
        w.i128le(a);
    }
    w.u32le(detail::crc32_ieee(std::span<const unsigned char>(w.bytes)));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_table: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(w.bytes.data()), std::streamsize(w.bytes.size()));
    if (!out) throw std::runtime_error("save_table: write failed for " + path.string());
}

inline CoefficientTable load_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_table: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 12) throw TableFormatError("table file truncated");
    u32 stored_crc = 0;
    for (int i = 0; i < 4; ++i) stored_crc |= u32(bytes[bytes.size() - 4 + i]) << (8 * i);
    u32 actual_crc =
        detail::crc32_ieee(std::span<const unsigned char>(bytes.data(), bytes.size() - 4));
    if (stored_crc != actual_crc) throw TableChecksumError("table checksum mismatch");

    detail::ByteReader r{std::span<const unsigned char>(bytes.data(), bytes.size() - 4)};
    if (r.str(4) != "HDTB") throw TableFormatError("bad magic");
    std::uint16_t version = r.u16le();
    if (version != 1)
        throw TableVersionError("unsupported table version " + std::to_string(version));

    FormSpec form = parse_form(r.str(r.u16le()));
    std::uint16_t k = r.u16le();
    u64 level = r.u64le();
    if (k != form.weight || level != form.level)
        throw TableFormatError("stored weight/level disagree with form descriptor");

    CoefficientTable t;
    t.form = form;
    t.x_max = r.u64le();
    std::uint16_t nexcl = r.u16le();
    for (std::uint16_t i = 0; i < nexcl; ++i) t.excluded_primes.push_back(r.u64le());
    u64 count = r.u64le();
    t.entries.reserve(count);
    u64 prev_p = 0;
    for (u64 i = 0; i < count; ++i) {
        u64 p = r.u64le();
        i128 a = r.i128le();
        if (p <= prev_p) throw TableFormatError("records not strictly increasing in p");
        if (!deligne_bound_holds(p, a, form.weight))
            throw TableBoundError("record violates the coefficient bound at p = " +
                                  std::to_string(p));
        t.entries.emplace_back(p, a);
        prev_p = p;
    }
    if (r.pos != r.bytes.size()) throw TableFormatError("trailing bytes in table file");
    return t;
}

inline FormSpec FormSpec::elliptic_curve(const std::array<i64, 5>& a) {
    for (i64 v : a)
        if (v < -kMaxWeierstrassCoeff || v > kMaxWeierstrassCoeff)
            throw std::invalid_argument("elliptic_curve: |a_i| must be <= 10^4");
    FormSpec f;
    f.kind = FormKind::EllipticCurve;
    f.weierstrass = a;
    f.weight = 2;
    i128 disc = f.discriminant();
    if (disc == 0) throw std::invalid_argument("elliptic_curve: singular model (discriminant 0)");

    Factorization df = factor(disc);
    f.level = 1;
    for (auto [p, e] : df.prime_powers) f.level *= u64(p);

    // CM iff j = c4^3 / disc is one of the thirteen rational CM values.
    // Cross-multiplied comparison c4^3 == j * disc, exact in 512 bits.
    auto [a1, a2, a3, a4, a6] = f.weierstrass;
    i128 b2 = i128(a1) * a1 + 4 * i128(a2);
    i128 b4 = 2 * i128(a4) + i128(a1) * a3;
    i128 c4 = b2 * b2 - 24 * b4;
    if (c4 == 0) {
        f.cm = true;  // j = 0
    } else {
        f.cm = false;
        for (i128 j : detail::kCmJInvariants) {
            if (j == 0) continue;
            int sign_lhs = c4 > 0 ? 1 : -1;
            int sign_rhs = ((j > 0) == (disc > 0)) ? 1 : -1;
            if (sign_lhs != sign_rhs) continue;
            WideUInt<8> lhs = detail::wide_mul_u128(
                detail::wide_mul_u128(WideUInt<8>::from_u128(abs_u128(c4)), abs_u128(c4)),
                abs_u128(c4));
            WideUInt<8> rhs =
                detail::wide_mul_u128(WideUInt<8>::from_u128(abs_u128(j)), abs_u128(disc));
            if (lhs == rhs) {
                f.cm = true;
                break;
            }
        }
    }

    // Semistable-style default: full mod-l image assumed for l > 7. The
    // CLI accepts explicit overrides for curves known to need more.
    f.exceptional_primes = {2, 3, 5, 7};
    return f;
}

inline FormSpec parse_form(std::string_view text) {
    if (text == "delta") return FormSpec::delta();
    constexpr std::string_view prefix = "ec:";
    if (text.substr(0, prefix.size()) == prefix) {
        std::array<i64, 5> coeffs{};
        std::string rest(text.substr(prefix.size()));
        std::size_t idx = 0, start = 0;
        for (std::size_t i = 0; i <= rest.size(); ++i) {
            if (i == rest.size() || rest[i] == ',') {
                if (idx >= 5) throw std::invalid_argument("parse_form: too many coefficients");
                std::string tok = rest.substr(start, i - start);
                std::size_t used = 0;
                coeffs[idx] = std::stoll(tok, &used);  // throws on empty/garbage
                if (used != tok.size()) throw std::invalid_argument("parse_form: bad integer");
                ++idx;
                start = i + 1;
            }
        }
        if (idx != 5)
            throw std::invalid_argument("parse_form: expected 5 coefficients a1,a2,a3,a4,a6");
        return FormSpec::elliptic_curve(coeffs);
    }
    throw std::invalid_argument("parse_form: unknown form descriptor '" + std::string(text) +
                                "'");
}

}  // namespace hecke
