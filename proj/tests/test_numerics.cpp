#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sgflow/numerics.hpp"

using namespace sgflow;

TEST_CASE("pairwise_sum matches long double reference") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> values(1000);
    long double ref = 0.0L;
    for (double& v : values) {
        v = dist(rng);
        ref += v;
    }
    CHECK(pairwise_sum(values) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
}

TEST_CASE("pairwise_sum handles tiny and empty inputs") {
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{3.5}) == 3.5);
}

TEST_CASE("logsumexp is shift-stable and handles -inf") {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> t{-1000.0, -1000.5};
    const double expected = -1000.0 + std::log(1.0 + std::exp(-0.5));
    CHECK(logsumexp(t) == doctest::Approx(expected).epsilon(1e-14));

    std::vector<double> with_ninf{0.0, -inf, -1.0};
    CHECK(logsumexp(with_ninf) ==
          doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-14));

    std::vector<double> all_ninf{-inf, -inf};
    CHECK(logsumexp(all_ninf) == -inf);
}

TEST_CASE("parallel_for output is bitwise identical across thread counts") {
    const std::size_t n = 5000;
    const auto fill = [&](std::vector<double>& out) {
        parallel_for(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i)
                out[i] = std::sin(static_cast<double>(i)) * std::sqrt(i + 1.0);
        });
    };
    std::vector<double> serial(n), parallel(n);
    set_thread_count(1);
    fill(serial);
    set_thread_count(4);
    fill(parallel);
    set_thread_count(1);
    CHECK(serial == parallel);
}

TEST_CASE("SplitMix64 streams are reproducible") {
    SplitMix64 a(42), b(42), c(43);
    bool same = true, different = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.next_unit();
        if (x != b.next_unit()) same = false;
        if (x != c.next_unit()) different = true;
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(same);
    CHECK(different);
}
