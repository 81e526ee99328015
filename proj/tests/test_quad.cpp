#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "ow/quad.hpp"

#include <cmath>

using ow::Interval;
using ow::integrate_1d;
using ow::integrate_2d;
using ow::QuadConfig;
using ow::QuadResult;

TEST_CASE("1d integrals of the basic antiderivative cases") {
    QuadConfig cfg;
    QuadResult r = integrate_1d([](double u) { return u; }, {0, 1}, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 0.5) <= cfg.abs_tol);
    CHECK(r.evaluations > 0);
    CHECK(r.error_estimate >= 0);

    r = integrate_1d([](double u) { return std::sin(u); }, {0, std::acos(-1.0)}, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 2.0) <= cfg.abs_tol);

    r = integrate_1d([](double u) { return std::exp(u); }, {0, 1}, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - (std::exp(1.0) - 1.0)) <= cfg.abs_tol);
}

TEST_CASE("2d integrals: separable products and constants") {
    QuadConfig cfg;
    QuadResult r = integrate_2d([](double t, double s) { return t * s; }, {0, 1}, {0, 1}, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 0.25) <= cfg.abs_tol);

    r = integrate_2d([](double, double) { return 1.0; }, {0, 1}, {0, 1}, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 1.0) <= cfg.abs_tol);

    double exact = (8.0 / 3.0) * (8.0 / 3.0);
    r = integrate_2d([](double t, double s) { return t * s * t * s; }, {0, 2}, {0, 2}, cfg);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - exact) <= 1e-9);
}

TEST_CASE("interval additivity on the catalog integrands") {
    QuadConfig cfg;
    auto check_additive = [&](const oracle::Fn1& g, double a, double b, double c) {
        double whole = integrate_1d(g, {a, c}, cfg).value;
        double parts = integrate_1d(g, {a, b}, cfg).value + integrate_1d(g, {b, c}, cfg).value;
        CHECK(std::fabs(whole - parts) <= 2 * cfg.abs_tol);
    };
    check_additive([](double u) { return u; }, 0, 0.7, 2);
    check_additive([](double u) { return std::sin(u); }, 0, 1.1, 3);
    check_additive([](double u) { return std::exp(u); }, -1, 0.3, 1);
    check_additive([](double u) { return 1 / (1 + u * u); }, 0, 0.25, 1.5);
}

TEST_CASE("linearity of the integral") {
    QuadConfig cfg;
    auto g = [](double u) { return std::sin(u); };
    auto h = [](double u) { return std::exp(-u); };
    double combined =
        integrate_1d([&](double u) { return 2 * g(u) + 3 * h(u); }, {0, 2}, cfg).value;
    double separate = 2 * integrate_1d(g, {0, 2}, cfg).value + 3 * integrate_1d(h, {0, 2}, cfg).value;
    CHECK(std::fabs(combined - separate) <= 2 * cfg.abs_tol);
}

TEST_CASE("low-degree polynomials are exact on a single panel") {
    QuadConfig cfg;
    for (int degree = 0; degree <= 3; ++degree) {
        QuadResult r = integrate_1d([&](double u) { return std::pow(u, degree); }, {0, 1}, cfg);
        CHECK(r.evaluations == 15); // one panel, no subdivision
        CHECK(std::fabs(r.value - 1.0 / (degree + 1)) <= 1e-14);
    }
}

TEST_CASE("depth and width limits report non-convergence honestly") {
    auto step = [](double u) { return u < 0.70710678118654752 ? 0.0 : 1.0; };

    QuadConfig shallow;
    shallow.abs_tol = 1e-14;
    shallow.rel_tol = 1e-300;
    shallow.max_depth = 3;
    QuadResult r = integrate_1d(step, {0, 1}, shallow);
    CHECK_FALSE(r.converged);
    CHECK(std::fabs(r.value - (1 - 0.70710678118654752)) < 0.1); // best estimate kept

    QuadConfig coarse;
    coarse.abs_tol = 1e-14;
    coarse.rel_tol = 1e-300;
    coarse.min_cell_width = 0.3;
    r = integrate_1d(step, {0, 1}, coarse);
    CHECK_FALSE(r.converged);
}

TEST_CASE("same inputs give bit-identical results") {
    QuadConfig cfg;
    auto g = [](double u) { return std::sin(3 * u) * std::exp(u); };
    QuadResult a = integrate_1d(g, {0, 2}, cfg);
    QuadResult b = integrate_1d(g, {0, 2}, cfg);
    CHECK(a.value == b.value);
    CHECK(a.error_estimate == b.error_estimate);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("2d evaluation counting refers to the integrand") {
    QuadConfig cfg;
    long long calls = 0;
    QuadResult r = integrate_2d(
        [&](double t, double s) {
            ++calls;
            return t + s;
        },
        {0, 1}, {0, 1}, cfg);
    CHECK(r.evaluations == calls);
}

TEST_CASE("bad intervals and configs are rejected") {
    CHECK_THROWS_AS(ow::validate_interval({1, 1}), ow::PreconditionError);
    CHECK_THROWS_AS(ow::validate_interval({2, 1}), ow::PreconditionError);
    CHECK_THROWS_AS(ow::validate_interval({0, std::numeric_limits<double>::infinity()}),
                    ow::PreconditionError);

    QuadConfig cfg;
    cfg.abs_tol = 0;
    CHECK_THROWS_AS(ow::validate_quad_config(cfg), ow::PreconditionError);
    cfg = {};
    cfg.rel_tol = -1;
    CHECK_THROWS_AS(ow::validate_quad_config(cfg), ow::PreconditionError);
    cfg = {};
    cfg.max_depth = 0;
    CHECK_THROWS_AS(ow::validate_quad_config(cfg), ow::PreconditionError);
    cfg = {};
    cfg.min_cell_width = 0;
    CHECK_THROWS_AS(ow::validate_quad_config(cfg), ow::PreconditionError);
}

TEST_CASE("integrand domain errors propagate") {
    auto g = [](double u) -> double {
        if (u < 0.1) throw ow::EvalDomainError("negative-ish argument", 0);
        return std::log(u);
    };
    CHECK_THROWS_AS(integrate_1d(g, {0, 1}, {}), ow::EvalDomainError);
}
