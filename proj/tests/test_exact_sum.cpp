#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "rfield/detail/exact_sum.hpp"

using rfield::exact_sum;

TEST_CASE("exact sum recovers cancellation that plain doubles lose") {
    exact_sum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1.0);
}

TEST_CASE("exact sum is invariant under permutation of inputs") {
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> mag(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-60, 60);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = std::ldexp(mag(gen), expo(gen));

    exact_sum forward;
    for (double x : xs) forward.add(x);
    const double ref = forward.value();

    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(xs.begin(), xs.end(), gen);
        exact_sum s;
        for (double x : xs) s.add(x);
        CHECK(s.value() == ref);
    }
}

TEST_CASE("merging partial sums equals one-pass summation bitwise") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> xs(5000);
    for (auto& x : xs) x = dist(gen) * std::ldexp(1.0, gen() % 40);

    exact_sum whole;
    for (double x : xs) whole.add(x);

    for (std::size_t parts : {2u, 3u, 7u}) {
        std::vector<exact_sum> chunk(parts);
        for (std::size_t i = 0; i < xs.size(); ++i) chunk[i % parts].add(xs[i]);
        exact_sum merged;
        for (const auto& c : chunk) merged.merge(c);
        CHECK(merged.value() == whole.value());
    }
}

TEST_CASE("exact sum matches plain summation on benign inputs") {
    exact_sum s;
    double plain = 0.0;
    for (int i = 1; i <= 100; ++i) {
        s.add(double(i));
        plain += double(i);
    }
    CHECK(s.value() == plain);
    CHECK(s.value() == 5050.0);
}

TEST_CASE("round-half-even correction at the partials boundary") {
    // 1 + 2^-53 + 2^-53: naive left-to-right gives 1, the exact value rounds
    // to 1 + 2^-52
    exact_sum s;
    s.add(1.0);
    s.add(0x1p-53);
    s.add(0x1p-53);
    CHECK(s.value() == 1.0 + 0x1p-52);
}
