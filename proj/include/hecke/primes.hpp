// primes.hpp
// Segmented sieve of Eratosthenes and prime counting. Every per-prime
// statistic in the library walks a PrimeTable, so the table is built
// once and shared read-only.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hecke/int128.hpp"

namespace hecke {

struct PrimeTable {
    u64 limit = 0;
    std::vector<u64> primes;  // strictly increasing, all primes <= limit
};

// All primes <= limit. Segments of 2^18 odd flags keep the working set
// small for limits around 10^7.
inline PrimeTable sieve_primes(u64 limit) {
    if (limit < 2) throw std::invalid_argument("sieve_primes: limit must be >= 2");
    if (limit >> 62) throw std::invalid_argument("sieve_primes: limit too large");

    // base primes up to sqrt(limit) by a plain odd sieve
    u64 root = u64(std::sqrt(double(limit)));
    while (root * root > limit) --root;
    while ((root + 1) * (root + 1) <= limit) ++root;
    std::vector<u64> base;
    {
        std::vector<bool> comp(root + 1, false);
        for (u64 i = 3; i * i <= root; i += 2)
            if (!comp[i])
                for (u64 j = i * i; j <= root; j += 2 * i) comp[j] = true;
        for (u64 i = 3; i <= root; i += 2)
            if (!comp[i]) base.push_back(i);
    }

    PrimeTable pt;
    pt.limit = limit;
    pt.primes.push_back(2);

    constexpr u64 kSegmentOdds = u64(1) << 18;  // odd numbers per segment
    std::vector<bool> seg;
    for (u64 low = 3; low <= limit; low += 2 * kSegmentOdds) {
        u64 high = std::min(limit, low + 2 * kSegmentOdds - 2);  // inclusive, odd range
        u64 count = (high - low) / 2 + 1;
        seg.assign(count, false);
        for (u64 p : base) {
            if (p * p > high) break;
            u64 start = std::max(p * p, ((low + p - 1) / p) * p);
            if (start % 2 == 0) start += p;
            for (u64 j = start; j <= high; j += 2 * p) seg[(j - low) / 2] = true;
        }
        for (u64 i = 0; i < count; ++i)
            if (!seg[i]) pt.primes.push_back(low + 2 * i);
    }
    return pt;
}

// #{p <= x} by binary search; O(log) per query.
inline u64 prime_count(const PrimeTable& pt, u64 x) {
    if (x > pt.limit) throw std::out_of_range("prime_count: x exceeds table limit");
    auto it = std::upper_bound(pt.primes.begin(), pt.primes.end(), x);
    return u64(it - pt.primes.begin());
}

}  // namespace hecke
