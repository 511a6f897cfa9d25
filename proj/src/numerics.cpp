#include "sgflow/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace sgflow {

namespace {

double pairwise_sum_impl(const double* p, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum_impl(p, half) + pairwise_sum_impl(p + half, n - half);
}

std::atomic<int> g_threads{1};

} // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_sum_impl(values.data(), values.size());
}

double logsumexp(std::span<const double> terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : terms) m = std::max(m, t);
    if (!std::isfinite(m)) return m; // all -inf (or an inf/NaN input propagates)
    thread_local std::vector<double> scratch;
    scratch.resize(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) scratch[i] = std::exp(terms[i] - m);
    return m + std::log(pairwise_sum_impl(scratch.data(), scratch.size()));
}

void set_thread_count(int threads) {
    if (threads < 0) threads = 0;
    g_threads.store(threads);
}

int thread_count() {
    int t = g_threads.load();
    if (t == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        t = hw == 0 ? 1 : static_cast<int>(std::min<unsigned>(hw, 16));
    }
    return t;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int t = thread_count();
    // Spawning is only worthwhile for wide loops; small ones run inline.
    if (t <= 1 || n < 256) {
        fn(0, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(t), n);
    const std::size_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> workers;
    workers.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = c * per;
        const std::size_t end = std::min(n, begin + per);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& w : workers) w.join();
}

std::uint64_t SplitMix64::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

} // namespace sgflow
