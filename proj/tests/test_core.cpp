// Wide integers, 128-bit helpers, Montgomery arithmetic, primality.
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hecke/int128.hpp"
#include "hecke/modmath.hpp"
#include "hecke/wide_uint.hpp"

using namespace hecke;

TEST_CASE("i128 decimal round-trip", "[core]") {
    CHECK(to_string_i128(0) == "0");
    CHECK(to_string_i128(-24) == "-24");
    CHECK(parse_i128("-170141183460469231731687303715884105727") == I128_MIN + 1);
    CHECK(parse_i128("170141183460469231731687303715884105727") == I128_MAX);
    CHECK_THROWS_AS(parse_i128("170141183460469231731687303715884105728"), std::out_of_range);
    CHECK_THROWS_AS(parse_i128("12x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_i128(""), std::invalid_argument);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        i128 v = (i128(rng()) << 64) ^ i128(rng());
        if (v == I128_MIN) continue;
        CHECK(parse_i128(to_string_i128(v)) == v);
    }
}

TEST_CASE("integer roots", "[core]") {
    CHECK(isqrt_u128(0) == 0);
    CHECK(isqrt_u128(15) == 3);
    CHECK(isqrt_u128(16) == 4);
    CHECK(icbrt_u128(26) == 2);
    CHECK(icbrt_u128(27) == 3);
    u128 big = (u128(1) << 126) - 1;
    u128 r = isqrt_u128(big);
    CHECK(r * r <= big);
    CHECK((r + 1) * (r + 1) > big);
}

TEST_CASE("WideUInt arithmetic matches u128 in range", "[core]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        u128 a = (u128(rng()) << 32) ^ rng();
        u128 b = (u128(rng()) << 32) ^ rng();
        u64 m = rng() | 1;
        auto wa = WideUInt<4>::from_u128(a);
        auto wb = WideUInt<4>::from_u128(b);
        auto sum = wa;
        sum += wb;
        CHECK(sum.to_u128() == a + b);
        auto prod = wa;
        prod.mul_u64(m);
        if (prod.fits_u128()) CHECK(prod.to_u128() == a * m);
        if (a >= b) {
            auto diff = wa;
            diff -= wb;
            CHECK(diff.to_u128() == a - b);
        }
        CHECK((wa <=> wb) == (a <=> b));
    }
    auto h = WideUInt<4>::from_u128(u128(7) << 100);
    h.shr1();
    CHECK(h.to_u128() == (u128(7) << 99));
    auto top = WideUInt<2>::from_u128(~u128(0));
    CHECK_THROWS_AS(top.mul_u64(2), std::overflow_error);
}

TEST_CASE("Montgomery multiplication agrees with plain mulmod", "[core]") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        u64 m = (rng() | 1) & ((u64(1) << 62) - 1);
        if (m < 3) continue;
        Montgomery64 mg(m);
        for (int j = 0; j < 20; ++j) {
            u64 a = rng() % m, b = rng() % m;
            CHECK(mg.from(mg.mul(mg.to(a), mg.to(b))) == mulmod(a, b, m));
        }
    }
    for (int i = 0; i < 40; ++i) {
        u128 m = ((u128(rng()) << 60) ^ rng()) | 1;
        Montgomery128 mg(m);
        for (int j = 0; j < 10; ++j) {
            u128 a = ((u128(rng()) << 64) ^ rng()) % m;
            u128 b = ((u128(rng()) << 64) ^ rng()) % m;
            u128 expect = 0;  // shift-add reference
            u128 x = a, y = b;
            while (y) {
                if (y & 1) expect = (expect + x) % m;
                x = (x + x) % m;
                y >>= 1;
            }
            CHECK(mg.from(mg.mul(mg.to(a), mg.to(b))) == expect);
        }
    }
}

TEST_CASE("probable-prime test vs trial division", "[core]") {
    int primes_found = 0;
    for (u64 n = 0; n <= 20000; ++n) {
        bool t = [&] {
            if (n < 2) return false;
            for (u64 d = 2; d * d <= n; ++d)
                if (n % d == 0) return false;
            return true;
        }();
        REQUIRE(is_probable_prime(n) == t);
        primes_found += t;
    }
    CHECK(primes_found == 2262);  // pi(20000)

    // Carmichael numbers and large pseudoprime bait
    for (u64 n : {561ull, 41041ull, 825265ull, 321197185ull}) CHECK_FALSE(is_probable_prime(n));
    CHECK(is_probable_prime((u128(1) << 89) - 1));   // Mersenne prime
    CHECK_FALSE(is_probable_prime((u128(1) << 67) - 1));
    CHECK(is_probable_prime(18446744073709551557ull));  // largest 64-bit prime
}
