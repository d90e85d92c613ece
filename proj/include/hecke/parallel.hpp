// parallel.hpp
// Block-partitioned worker helper. Results are always merged in block
// order, so output never depends on the worker count.
#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hecke {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Splits [0, count) into contiguous blocks and runs fn(block, begin, end)
// concurrently. Blocks are indexed 0..num_blocks-1 in range order; the
// caller combines per-block results by index.
template <typename Fn>
void for_each_block(std::size_t count, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    std::size_t num_blocks = threads;
    if (num_blocks > count) num_blocks = count ? count : 1;
    if (num_blocks <= 1) {
        fn(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(num_blocks);
    std::size_t chunk = count / num_blocks;
    std::size_t extra = count % num_blocks;
    std::size_t begin = 0;
    for (std::size_t b = 0; b < num_blocks; ++b) {
        std::size_t len = chunk + (b < extra ? 1 : 0);
        std::size_t end = begin + len;
        pool.emplace_back([&, b, begin, end] {
            try {
                fn(b, begin, end);
            } catch (...) {
                errors[b] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace hecke
