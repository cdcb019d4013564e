#include <doctest.h>

#include <cmath>
#include <random>

#include "eqlab/rng.hpp"

TEST_CASE("mt19937 matches the standard generator word for word") {
    for (std::uint32_t seed : {5489u, 1u, 20260101u}) {
        eqlab::rng::Mt19937 ours(seed);
        std::mt19937 ref(seed);
        for (int i = 0; i < 2000; ++i) CHECK(ours.next_u32() == ref());
    }
}

TEST_CASE("default-seed first output is the canonical value") {
    eqlab::rng::Mt19937 gen(5489);
    CHECK(gen.next_u32() == 3499211612u);
}

TEST_CASE("same seed, same stream") {
    eqlab::rng::Mt19937 a(777), b(777);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("gaussian moments are sane") {
    eqlab::rng::Mt19937 gen(99);
    const int n = 200000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double v = gen.next_gaussian();
        s1 += v;
        s2 += v * v;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("complex gaussian has unit mean power") {
    eqlab::rng::Mt19937 gen(123);
    const int n = 200000;
    double p = 0;
    for (int i = 0; i < n; ++i) p += std::norm(gen.next_cgaussian());
    CHECK(p / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("next_below stays in range and covers values") {
    eqlab::rng::Mt19937 gen(5);
    std::vector<int> seen(10, 0);
    for (int i = 0; i < 10000; ++i) {
        auto v = gen.next_below(10);
        REQUIRE(v < 10);
        ++seen[static_cast<std::size_t>(v)];
    }
    for (int c : seen) CHECK(c > 800);
}
