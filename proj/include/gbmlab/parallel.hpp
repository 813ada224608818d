/**
 * @file parallel.hpp
 * @brief Deterministic parallel loops and compensated reductions.
 *
 * Work is split into fixed-size blocks whose boundaries depend only on the
 * item count, never on the thread count. Workers claim blocks dynamically and
 * write into per-block slots; callers then combine slots in block order.
 * Together with compensated summation this makes every reduction bit-stable
 * for 1 thread or 64.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace gbmlab {

/// Block width used by every deterministic reduction in the library. Part of
/// the output contract: changing it changes low-order bits of averaged data.
inline constexpr std::int64_t kReductionBlock = 1024;

/// Neumaier compensated accumulator.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    /// Folds another accumulator in (sum first, then its compensation).
    void merge(const NeumaierSum& other) {
        add(other.sum);
        add(other.comp);
    }

    double value() const { return sum + comp; }
};

inline int default_thread_count() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs fn(block_index, begin, end) over [0, n) in blocks of `block_size`.
/// Blocks are claimed dynamically, so fn must only touch per-block state.
inline void for_each_block(std::int64_t n, std::int64_t block_size, int threads,
                           const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& fn) {
    if (n < 0 || block_size <= 0) throw std::invalid_argument("for_each_block: bad sizes");
    if (n == 0) return;
    const std::int64_t n_blocks = (n + block_size - 1) / block_size;
    if (threads <= 0) threads = default_thread_count();
    if (threads > n_blocks) threads = static_cast<int>(n_blocks);

    if (threads == 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b)
            fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            try {
                fn(b, b * block_size, std::min(n, (b + 1) * block_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Deterministic compensated sum: per-block Neumaier sums merged in block
/// order. Depends only on the data, not on threading.
inline double blocked_sum(std::span<const double> xs) {
    NeumaierSum total;
    for (std::size_t begin = 0; begin < xs.size(); begin += kReductionBlock) {
        const std::size_t end = std::min(xs.size(), begin + static_cast<std::size_t>(kReductionBlock));
        NeumaierSum block;
        for (std::size_t i = begin; i < end; ++i) block.add(xs[i]);
        total.merge(block);
    }
    return total.value();
}

/// Deterministic mean via blocked_sum; NaN for empty input.
inline double blocked_mean(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    return blocked_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace gbmlab
