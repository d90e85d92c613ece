#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hecke/coeffs.hpp"
#include "frozen_values.hpp"
#include "oracles.hpp"

using namespace hecke;

namespace {
const FormSpec kCurve11a = parse_form("ec:0,-1,1,-10,-20");
const FormSpec kCurveCm = parse_form("ec:0,0,0,-1,0");

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("form parsing and derived data", "[coeffs]") {
    FormSpec d = parse_form("delta");
    CHECK(d.kind == FormKind::Delta);
    CHECK(d.weight == 12);
    CHECK(d.level == 1);
    CHECK_FALSE(d.cm);
    CHECK(d.exceptional_primes == std::vector<u64>{2, 3, 5, 7, 23, 691});
    CHECK(d.descriptor() == "delta");

    CHECK(kCurve11a.weight == 2);
    CHECK(kCurve11a.discriminant() == -161051);  // -11^5
    CHECK(kCurve11a.level == 11);
    CHECK_FALSE(kCurve11a.cm);
    CHECK(kCurve11a.descriptor() == "ec:0,-1,1,-10,-20");

    CHECK(kCurveCm.discriminant() == 64);
    CHECK(kCurveCm.cm);  // j = 1728

    CHECK_THROWS_AS(parse_form("ec:0,0,0,0,0"), std::invalid_argument);  // singular
    CHECK_THROWS_AS(parse_form("ec:1,2,3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_form("gibberish"), std::invalid_argument);
    CHECK_THROWS_AS(parse_form("ec:0,0,0,-1,99999999"), std::invalid_argument);  // coeff cap
}

TEST_CASE("ec_trace matches enumeration for good p < 200 on both curves", "[coeffs]") {
    for (auto [p, a] : frozen::kCurve11aTraces) {
        REQUIRE(ec_trace(kCurve11a, p) == a);
        REQUIRE(oracles::ec_trace_enumeration(kCurve11a, p) == a);
    }
    for (auto [p, a] : frozen::kCurveCmTraces) {
        REQUIRE(ec_trace(kCurveCm, p) == a);
        REQUIRE(oracles::ec_trace_enumeration(kCurveCm, p) == a);
    }
}

TEST_CASE("ec_trace spec values", "[coeffs]") {
    CHECK(ec_trace(kCurve11a, 2) == -2);
    CHECK(ec_trace(kCurve11a, 3) == -1);
    CHECK(ec_trace(kCurve11a, 5) == 1);
    CHECK(ec_trace(kCurveCm, 5) == -2);  // 8 projective points
    CHECK(ec_trace(kCurveCm, 7) == 0);   // supersingular, 7 = 3 mod 4
    CHECK_THROWS_AS(ec_trace(kCurve11a, 11), ExcludedPrimeError);
    CHECK_THROWS_AS(ec_trace(kCurveCm, 2), ExcludedPrimeError);
    CHECK_THROWS_AS(ec_trace(FormSpec::delta(), 5), std::invalid_argument);
}

TEST_CASE("ec_trace respects the Hasse bound", "[coeffs]") {
    auto pt = sieve_primes(5000);
    for (u64 p : pt.primes) {
        if (161051 % p == 0) continue;
        i64 a = ec_trace(kCurve11a, p);
        REQUIRE(u128(i128(a) * a) <= 4 * u128(p));
    }
}

TEST_CASE("build_table examples", "[coeffs]") {
    auto td = build_table(FormSpec::delta(), 100);
    REQUIRE(td.entries.size() == 25);
    CHECK(td.entries[0] == std::pair<u64, i128>{2, -24});
    CHECK(td.entries[1] == std::pair<u64, i128>{3, 252});
    CHECK(td.excluded_primes.empty());

    auto t11 = build_table(kCurve11a, 20);
    std::vector<u64> ps;
    for (auto [p, a] : t11.entries) ps.push_back(p);
    CHECK(ps == std::vector<u64>{2, 3, 5, 7, 13, 17, 19});
    CHECK(t11.excluded_primes == std::vector<u64>{11});

    CHECK_THROWS_AS(build_table(FormSpec::delta(), 1), std::invalid_argument);
}

TEST_CASE("tau(p) = 1 + p^11 mod 691 certified by the naive oracle first", "[coeffs]") {
    auto naive = oracles::naive_eta24(100);
    auto table = build_table(FormSpec::delta(), 100);
    for (auto [p, a] : table.entries) {
        REQUIRE(a == naive[p - 1]);
        u64 rhs = 1, base = p % 691;
        for (int i = 0; i < 11; ++i) rhs = rhs * base % 691;
        rhs = (rhs + 1) % 691;
        u64 lhs = u64(((a % 691) + 691) % 691);
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("CM curve vanishing pattern: a_p = 0 iff p = 3 mod 4", "[coeffs]") {
    auto t = build_table(kCurveCm, 10000, 2);
    for (auto [p, a] : t.entries) REQUIRE((a == 0) == (p % 4 == 3));
}

TEST_CASE("tables are identical across worker counts", "[coeffs]") {
    auto a = build_table(kCurve11a, 3000, 1);
    auto b = build_table(kCurve11a, 3000, 4);
    CHECK(a.entries == b.entries);
    auto da = build_table(FormSpec::delta(), 2000, 1);
    auto db = build_table(FormSpec::delta(), 2000, 3);
    CHECK(da.entries == db.entries);
}

TEST_CASE("save/load round-trip is exact", "[coeffs]") {
    auto t = build_table(FormSpec::delta(), 10000);
    auto path = temp_file("hecke_test_delta.tbl");
    save_table(t, path);
    auto t2 = load_table(path);
    CHECK(t2.x_max == t.x_max);
    CHECK(t2.entries == t.entries);
    CHECK(t2.excluded_primes == t.excluded_primes);
    CHECK(t2.form.descriptor() == "delta");
    std::filesystem::remove(path);
}

TEST_CASE("load rejects corruption with distinct errors", "[coeffs]") {
    auto t = build_table(kCurve11a, 500);
    auto path = temp_file("hecke_test_corrupt.tbl");
    save_table(t, path);
    auto bytes = [&] {
        std::ifstream in(path, std::ios::binary);
        return std::vector<char>((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
    }();

    SECTION("truncation fails the checksum") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), std::streamsize(bytes.size() - 7));
        out.close();
        CHECK_THROWS_AS(load_table(path), TableChecksumError);
    }
    SECTION("bit flip fails the checksum") {
        bytes[bytes.size() / 2] ^= 0x20;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), std::streamsize(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_table(path), TableChecksumError);
    }
    SECTION("version bump is its own error") {
        // version lives at offset 4..5; re-checksum so only the version trips
        bytes[4] = 2;
        u32 crc = detail::crc32_ieee(std::span<const unsigned char>(
            reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size() - 4));
        for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = char((crc >> (8 * i)) & 0xFF);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), std::streamsize(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_table(path), TableVersionError);
    }
    SECTION("bound-violating record is rejected after re-checksum") {
        // first record's a(p) starts after p; overwrite with a huge value
        // offset: 4 magic + 2 ver + 2 + desc + 2 k + 8 N + 8 xmax + 2 + 8 excl + 8 cnt
        std::size_t desc_len = t.form.descriptor().size();
        std::size_t rec0 = 4 + 2 + 2 + desc_len + 2 + 8 + 8 + 2 + 8 * t.excluded_primes.size() + 8;
        for (int i = 0; i < 15; ++i) bytes[rec0 + 8 + i] = 0x7F;  // ~2^119
        u32 crc = detail::crc32_ieee(std::span<const unsigned char>(
            reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size() - 4));
        for (int i = 0; i < 4; ++i) bytes[bytes.size() - 4 + i] = char((crc >> (8 * i)) & 0xFF);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), std::streamsize(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_table(path), TableBoundError);
    }
    std::filesystem::remove(path);
}

TEST_CASE("crc32 known answer", "[coeffs]") {
    const unsigned char s[] = "123456789";
    CHECK(detail::crc32_ieee(std::span<const unsigned char>(s, 9)) == 0xCBF43926u);
}

TEST_CASE("deligne_bound_holds edges", "[coeffs]") {
    CHECK(deligne_bound_holds(2, -24, 12));
    CHECK(deligne_bound_holds(5, 4830, 12));
    // 4 * 5^11 = 195312500, floor(sqrt) = 13975
    CHECK(deligne_bound_holds(5, 13975, 12));
    CHECK_FALSE(deligne_bound_holds(5, 13976, 12));
    CHECK(deligne_bound_holds(2, 2, 2));        // 4 <= 8
    CHECK_FALSE(deligne_bound_holds(2, 3, 2));  // 9 > 8
    CHECK(deligne_bound_holds(1000003, 0, 12));
}
