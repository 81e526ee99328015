#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "ow/kernel.hpp"

#include <cmath>
#include <random>

using ow::Interval;
using ow::Kernel;
using ow::WeightSpec;

TEST_CASE("pointwise values on both sides of the split") {
    Kernel k(WeightSpec::constant({0, 1}), {0, 1}, 0.5);
    CHECK(k(0.25) == 0.25);
    CHECK(k(0.75) == -0.25);
    CHECK(k(0.5) == -0.5); // the split itself takes the negative branch
    CHECK(k(0.0) == 0.0);
    CHECK(k(1.0) == 0.0);
}

TEST_CASE("absolute integrals against the moment closed forms") {
    Kernel half(WeightSpec::constant({0, 1}), {0, 1}, 0.5);
    CHECK(std::fabs(half.abs_integral() - 0.25) <= 1e-9);

    Kernel left(WeightSpec::constant({0, 2}), {0, 2}, 0.0);
    CHECK(std::fabs(left.abs_integral() - 2.0) <= 1e-9);

    Kernel lin(WeightSpec::linear({0, 2}), {0, 2}, 1.0);
    double brute = oracle::abs_moment([](double u) { return u; }, 0, 2, 1);
    CHECK(std::fabs(lin.abs_integral() - brute) <= 1e-9);
}

TEST_CASE("sign structure: nonnegative left of the split, nonpositive from it on") {
    for (const auto& cw : oracle::weights()) {
        WeightSpec w = WeightSpec::from_selector(cw.selector, Interval{0.5, 2.5});
        Kernel k(w, {0.5, 2.5}, 1.2);
        for (int i = 0; i < 100; ++i) {
            double left = 0.5 + (1.2 - 0.5) * i / 100.0;
            double right = 1.2 + (2.5 - 1.2) * i / 100.0;
            CHECK(k(left) >= 0.0);
            CHECK(k(right) <= 0.0);
        }
    }
}

TEST_CASE("the jump at the split approaches the interval mass") {
    WeightSpec w = WeightSpec::linear({0.5, 2.5});
    Kernel k(w, {0.5, 2.5}, 1.3);
    double mass = w.mass({0.5, 2.5});
    double jump_coarse = k(1.3 - 1e-6) - k(1.3);
    double jump_fine = k(1.3 - 1e-8) - k(1.3);
    CHECK(std::fabs(jump_fine - mass) <= std::fabs(jump_coarse - mass) + 1e-9);
    CHECK(std::fabs(jump_fine - mass) <= 1e-7);
}

TEST_CASE("absolute kernel integral equals the weight's absolute moment") {
    std::mt19937_64 rng(9001);
    for (const auto& cw : oracle::weights()) {
        for (int i = 0; i < 6; ++i) {
            double lo = oracle::urand(rng, 0.1, 1.0);
            double hi = lo + oracle::urand(rng, 0.5, 1.5);
            double split = oracle::urand(rng, lo, hi);
            WeightSpec w = WeightSpec::from_selector(cw.selector, Interval{lo, hi});
            Kernel k(w, {lo, hi}, split);
            CHECK(std::fabs(k.abs_integral() - w.abs_moment({lo, hi}, split)) <= 1e-9);
        }
    }
}

TEST_CASE("constructor and evaluation preconditions") {
    WeightSpec w = WeightSpec::constant({0, 1});
    CHECK_THROWS_AS(Kernel(w, {0, 1}, 1.5), ow::PreconditionError); // split outside
    CHECK_THROWS_AS(Kernel(w, {-1, 1}, 0.0), ow::PreconditionError); // outside domain
    Kernel k(w, {0, 1}, 0.5);
    CHECK_THROWS_AS(k(1.5), ow::PreconditionError);
    CHECK_THROWS_AS(k(-0.1), ow::PreconditionError);
}
