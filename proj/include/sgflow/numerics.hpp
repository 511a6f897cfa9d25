#ifndef SGFLOW_NUMERICS_HPP
#define SGFLOW_NUMERICS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sgflow {

// Summation with a fixed pairwise-reduction order. Used for every
// value-level reduction in the library so that results do not depend on
// the thread count (parallelism is only ever across independent rows).
double pairwise_sum(std::span<const double> values);

// log(sum_k exp(terms[k])) with a running-max shift. -inf terms are
// allowed (zero-weight atoms); the result is -inf only if all terms are.
double logsumexp(std::span<const double> terms);

// Global worker-thread setting. 0 means auto (hardware concurrency).
// Results are bitwise independent of this value by construction.
void set_thread_count(int threads);
int thread_count();

// Runs fn(begin, end) over a static partition of [0, n). The partition
// only distributes independent rows; no reduction crosses chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

// Deterministic uniform double in [0, 1) from a 64-bit generator state,
// pinned to bit-twiddling rather than std::uniform_real_distribution so
// streams are identical across standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double next_unit(); // [0, 1)
private:
    std::uint64_t state_;
};

} // namespace sgflow

#endif
