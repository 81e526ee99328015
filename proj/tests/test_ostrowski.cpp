#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "ow/ostrowski.hpp"

#include <array>
#include <cmath>
#include <random>

using ow::EvalPoint;
using ow::Expression;
using ow::Interval;
using ow::SubRect;
using ow::WeightSpec;

namespace {

const std::vector<std::string> kTS = {"t", "s"};

// The full identity, brute-forced with test-side Simpson rules: every term
// is recomputed from scratch, kernels included.
double identity_residual_oracle(const oracle::Fn2& f, const oracle::Fn2& fts,
                                const oracle::Fn1& w, const SubRect& sub, double x, double y) {
    double t_lo = sub.t_sub.lo, t_hi = sub.t_sub.hi;
    double s_lo = sub.s_sub.lo, s_hi = sub.s_sub.hi;
    double m_a = oracle::mass(w, t_lo, t_hi);
    double m_b = oracle::mass(w, s_lo, s_hi);
    double t_line = oracle::simpson([&](double t) { return w(t) * f(t, y); }, t_lo, t_hi) / m_a;
    double s_line = oracle::simpson([&](double s) { return w(s) * f(x, s); }, s_lo, s_hi) / m_b;
    double dbl =
        oracle::simpson2([&](double t, double s) { return w(t) * w(s) * f(t, s); }, t_lo, t_hi,
                         s_lo, s_hi, 256) /
        (m_a * m_b);
    // quadrant split at (x, y): fix each kernel factor to its one-sided
    // branch so the quadrant integrands stay smooth up to the edges
    auto p_low = [&](double t) { return oracle::simpson(w, t_lo, t, 512); };
    auto p_high = [&](double t) { return -oracle::simpson(w, t, t_hi, 512); };
    auto q_low = [&](double s) { return oracle::simpson(w, s_lo, s, 512); };
    auto q_high = [&](double s) { return -oracle::simpson(w, s, s_hi, 512); };
    double kd = 0.0;
    const double txs[3] = {t_lo, x, t_hi};
    const double sys[3] = {s_lo, y, s_hi};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (txs[i + 1] - txs[i] < 1e-14 || sys[j + 1] - sys[j] < 1e-14) continue;
            auto pq_fts = [&](double t, double s) {
                double p = i == 0 ? p_low(t) : p_high(t);
                double q = j == 0 ? q_low(s) : q_high(s);
                return p * q * fts(t, s);
            };
            kd += oracle::simpson2(pq_fts, txs[i], txs[i + 1], sys[j], sys[j + 1], 96);
        }
    return std::fabs(f(x, y) - t_line - s_line + dbl - kd / (m_a * m_b));
}

Expression parse_ts(const char* text) { return Expression::parse(text, kTS); }

} // namespace

TEST_CASE("identity residual vanishes for functions with zero mixed partial") {
    Expression f = parse_ts("t+s");
    for (const auto& cw : oracle::weights()) {
        WeightSpec w = WeightSpec::from_selector(cw.selector, Interval{0.25, 2.5});
        SubRect sub{{0.5, 2.0}, {0.25, 1.75}};
        ow::IdentityResult r = ow::identity_residual(f, w, sub, {1.0, 0.75});
        CHECK(r.converged);
        CHECK(r.residual <= 1e-9);
    }
}

TEST_CASE("identity residual on the bilinear case, cross-checked term by term") {
    Expression f = parse_ts("t*s");
    WeightSpec w = WeightSpec::constant({0, 1});
    SubRect sub{{0, 1}, {0, 1}};
    ow::IdentityResult r = ow::identity_residual(f, w, sub, {0.25, 0.25});
    CHECK(r.converged);
    CHECK(r.residual <= 1e-9);
    CHECK(r.evaluations > 0);

    double brute = identity_residual_oracle([](double t, double s) { return t * s; },
                                            [](double, double) { return 1.0; },
                                            [](double) { return 1.0; }, sub, 0.25, 0.25);
    CHECK(brute <= 1e-9);
}

TEST_CASE("identity residual for a transcendental integrand and a linear weight") {
    Expression f = parse_ts("sin(t)*exp(s)");
    WeightSpec w = WeightSpec::linear({0.5, 2});
    SubRect sub{{0.5, 2}, {0.5, 2}};
    ow::IdentityResult r = ow::identity_residual(f, w, sub, {1.0, 1.0});
    CHECK(r.converged);
    CHECK(r.residual <= 1e-8);

    double brute = identity_residual_oracle(
        [](double t, double s) { return std::sin(t) * std::exp(s); },
        [](double t, double s) { return std::cos(t) * std::exp(s); },
        [](double u) { return u; }, sub, 1.0, 1.0);
    CHECK(brute <= 1e-8);
}

TEST_CASE("defect of a constant is zero and of the bilinear witness is the product") {
    Expression c = parse_ts("3");
    WeightSpec u = WeightSpec::linear({0.5, 2});
    CHECK(ow::defect(c, u, {{0.5, 2}, {0.5, 2}}, {1.0, 1.2}).value <= 1e-12);

    Expression f = parse_ts("t*s");
    WeightSpec one = WeightSpec::constant({0, 1});
    SubRect sub{{0, 1}, {0, 1}};
    CHECK(ow::defect(f, one, sub, {0.5, 0.5}).value <= 1e-12);
    CHECK(std::fabs(ow::defect(f, one, sub, {0, 0}).value - 0.25) <= 1e-10);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        double x = oracle::urand(rng, 0, 1);
        double y = oracle::urand(rng, 0, 1);
        double expansion = std::fabs((x - 0.5) * (y - 0.5));
        CHECK(std::fabs(ow::defect(f, one, sub, {x, y}).value - expansion) <= 1e-9);
    }
}

TEST_CASE("sup-norm estimates for functions whose maximum sits on the grid") {
    SubRect unit{{0, 1}, {0, 1}};
    ow::SupNormEstimate e = ow::sup_norm_mixed(parse_ts("t*s"), unit);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.method == ow::SupNormMethod::SymbolicGrid);
    CHECK(e.evaluations > 0);

    e = ow::sup_norm_mixed(parse_ts("t^2*s^2"), unit);
    CHECK(e.value == doctest::Approx(4.0).epsilon(1e-12));

    e = ow::sup_norm_mixed(parse_ts("sin(t)*sin(s)"), unit);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sup-norm falls back to differences when abs blocks the derivative") {
    SubRect box{{0.5, 1.5}, {0.5, 1.5}};
    ow::SupNormEstimate e = ow::sup_norm_mixed(parse_ts("abs(t)*s"), box);
    CHECK(e.method == ow::SupNormMethod::NumericGrid);
    CHECK(std::fabs(e.value - 1.0) <= 1e-6);
}

TEST_CASE("sup-norm search refines an interior maximum beyond the grid") {
    // mixed partial of sin(t)*sin(s) on this box peaks strictly inside
    SubRect box{{-1.2, 0.7}, {-1.2, 0.7}};
    ow::SupNormEstimate e = ow::sup_norm_mixed(parse_ts("sin(t)*sin(s)"), box, 41);
    CHECK(e.value <= 1.0 + 1e-12);
    CHECK(e.value >= 1.0 - 1e-6);
}

TEST_CASE("non-finite derivatives surface as domain errors") {
    SubRect unit{{0, 1}, {0, 1}};
    CHECK_THROWS_AS(ow::sup_norm_mixed(parse_ts("s/(t-0.5)"), unit), ow::EvalDomainError);
}

TEST_CASE("bound factors: moments over masses times the sup-norm") {
    WeightSpec one = WeightSpec::constant({0, 1});
    SubRect unit{{0, 1}, {0, 1}};
    CHECK(std::fabs(ow::bound(one, unit, {0.5, 0.5}, 1.0) - 1.0 / 16.0) <= 1e-12);
    CHECK(std::fabs(ow::bound(one, unit, {0, 0}, 1.0) - 0.25) <= 1e-12);

    WeightSpec u = WeightSpec::linear({0, 2});
    SubRect big{{0, 2}, {0, 2}};
    double m = oracle::mass([](double v) { return v; }, 0, 2);
    double a = oracle::abs_moment([](double v) { return v; }, 0, 2, 1);
    CHECK(std::fabs(ow::bound(u, big, {1, 1}, 1.0) - a * a / (m * m)) <= 1e-10);
    CHECK(std::fabs(ow::bound(u, big, {1, 1}, 1.0) - 0.25) <= 1e-10);

    CHECK_THROWS_AS(ow::bound(one, unit, {0.5, 0.5}, -1.0), ow::PreconditionError);
}

TEST_CASE("closed-form constants: unit-weight cases agree, linear-weight case differs") {
    ow::Rect unit{{0, 1}, {0, 1}};
    ow::ConstantPair p =
        ow::closed_form_constant(ow::ConstantCase::W1Midpoint, unit, {{0, 1}, {0, 1}});
    CHECK(std::fabs(p.paper_value - 1.0 / 16) <= 1e-12);
    CHECK(std::fabs(p.derived_value - 1.0 / 16) <= 1e-12);
    CHECK_FALSE(p.mismatch);

    ow::Rect two{{0, 2}, {0, 2}};
    p = ow::closed_form_constant(ow::ConstantCase::W1Subrect, two, {{0, 2}, {0, 2}});
    CHECK(std::fabs(p.paper_value - 0.25) <= 1e-12);
    CHECK(std::fabs(p.derived_value - 0.25) <= 1e-12);
    CHECK_FALSE(p.mismatch);

    ow::Rect off{{1, 3}, {1, 3}};
    p = ow::closed_form_constant(ow::ConstantCase::WuMidpoint, off, {{1, 3}, {1, 3}});
    CHECK(std::fabs(p.paper_value - 1.0) <= 1e-12);
    CHECK(std::fabs(p.derived_value - 0.25) <= 1e-9);
    CHECK(p.mismatch);
    // derived value re-established by brute force
    double m = oracle::mass([](double v) { return v; }, 1, 3);
    double a = oracle::abs_moment([](double v) { return v; }, 1, 3, 2);
    CHECK(std::fabs(p.derived_value - a * a / (m * m)) <= 1e-9);

    p = ow::closed_form_constant(ow::ConstantCase::WuMidpoint, two, {{0, 2}, {0, 2}});
    CHECK(std::fabs(p.paper_value - 0.25) <= 1e-12);
    CHECK(std::fabs(p.derived_value - 0.25) <= 1e-9);
    CHECK_FALSE(p.mismatch);

    CHECK_THROWS_AS(
        ow::closed_form_constant(ow::ConstantCase::WuMidpoint, {{-1, 1}, {0, 1}}, {{-1, 1}, {0, 1}}),
        ow::PreconditionError);
}

TEST_CASE("verification packs defect, bound and the equality witness") {
    Expression f = parse_ts("t*s");
    WeightSpec one = WeightSpec::constant({0, 1});
    SubRect unit{{0, 1}, {0, 1}};

    ow::BoundReport corner = ow::verify(f, one, unit, {0, 0});
    CHECK(std::fabs(corner.defect - 0.25) <= 1e-9);
    CHECK(std::fabs(corner.bound - 0.25) <= 1e-9);
    CHECK(std::fabs(corner.ratio - 1.0) <= 1e-8);
    CHECK(corner.satisfied);

    ow::BoundReport center = ow::verify(f, one, unit, {0.5, 0.5});
    CHECK(center.defect <= 1e-12);
    CHECK(std::fabs(center.bound - 1.0 / 16) <= 1e-12);
    CHECK(center.satisfied);
    CHECK(center.ratio <= 1e-10);

    Expression g = parse_ts("sin(t)*exp(s)");
    WeightSpec u = WeightSpec::linear({0.5, 2});
    SubRect box{{0.5, 2}, {0.5, 2}};
    double med = u.weighted_median({0.5, 2});
    ow::BoundReport r = ow::verify(g, u, box, {med, med});
    CHECK(r.satisfied);
    CHECK(r.quad_converged);
}

TEST_CASE("a user-supplied sup-norm overrides the estimate") {
    Expression f = parse_ts("t*s");
    WeightSpec one = WeightSpec::constant({0, 1});
    SubRect unit{{0, 1}, {0, 1}};
    ow::BoundReport est = ow::verify(f, one, unit, {0.25, 0.25});
    ow::BoundReport ovr = ow::verify(f, one, unit, {0.25, 0.25}, {}, 2.0);
    CHECK(ovr.sup_norm == 2.0);
    CHECK(ovr.sup_norm_method == ow::SupNormMethod::UserOverride);
    CHECK(std::fabs(ovr.bound - 2.0 * est.bound) <= 1e-12);
}

TEST_CASE("sweeps cover the interior lattice in row-major order") {
    Expression f = parse_ts("t*s");
    WeightSpec one = WeightSpec::constant({0, 1});
    SubRect unit{{0, 1}, {0, 1}};
    std::vector<ow::BoundReport> reports = ow::sweep(f, one, unit, 3, 3);
    REQUIRE(reports.size() == 9);
    for (const auto& r : reports) CHECK(r.satisfied);
    CHECK(reports[4].defect <= 1e-12); // the center point
    // row-major with x slowest
    CHECK(reports[0].point.x == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(reports[0].point.y == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(reports[1].point.y == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(reports[3].point.x == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(ow::sweep(f, one, unit, 1, 1), ow::PreconditionError);

    Expression affine = parse_ts("t+s");
    for (const auto& r : ow::sweep(affine, one, unit, 2, 4)) CHECK(r.defect <= 1e-9);
}

TEST_CASE("bound dominates defect on a randomized mini-suite") {
    std::mt19937_64 rng(20260819);
    for (const auto& cf : oracle::functions()) {
        Expression f = parse_ts(cf.text);
        for (const auto& cw : oracle::weights()) {
            WeightSpec w = WeightSpec::from_selector(cw.selector, Interval{0.1, 2.6});
            for (int i = 0; i < 2; ++i) {
                double t_lo = oracle::urand(rng, 0.1, 1.2);
                double t_hi = t_lo + oracle::urand(rng, 0.4, 1.3);
                double s_lo = oracle::urand(rng, 0.1, 1.2);
                double s_hi = s_lo + oracle::urand(rng, 0.4, 1.3);
                SubRect sub{{t_lo, t_hi}, {s_lo, s_hi}};
                double x = oracle::urand(rng, t_lo + 0.05 * (t_hi - t_lo),
                                         t_hi - 0.05 * (t_hi - t_lo));
                double y = oracle::urand(rng, s_lo + 0.05 * (s_hi - s_lo),
                                         s_hi - 0.05 * (s_hi - s_lo));
                ow::BoundReport r = ow::verify(f, w, sub, {x, y});
                CHECK(r.satisfied);
                CHECK(r.defect <= r.bound * (1 + 1e-8) + 1e-9);
                ow::IdentityResult ir = ow::identity_residual(f, w, sub, {x, y});
                CHECK(ir.residual <= 1e-8);
            }
        }
    }
}

TEST_CASE("defect and bound do not react to scaling the weight") {
    Expression f = parse_ts("sin(t)*exp(s)");
    SubRect sub{{0.5, 2}, {0.5, 2}};
    EvalPoint p{0.8, 1.6};
    WeightSpec base = WeightSpec::from_selector("expr:1+u^2", Interval{0.5, 2});
    double d0 = ow::defect(f, base, sub, p).value;
    double b0 = ow::bound(base, sub, p, 1.0);
    for (const char* sel : {"expr:0.5*(1+u^2)", "expr:3*(1+u^2)"}) {
        WeightSpec scaled = WeightSpec::from_selector(sel, Interval{0.5, 2});
        double d1 = ow::defect(f, scaled, sub, p).value;
        double b1 = ow::bound(scaled, sub, p, 1.0);
        CHECK(std::fabs(d1 - d0) <= 1e-9 * std::max(1.0, std::fabs(d0)));
        CHECK(std::fabs(b1 - b0) <= 1e-9 * std::fabs(b0));
    }
}

TEST_CASE("unit-weight bounds reduce to the quarter-width-squared product form") {
    std::mt19937_64 rng(77);
    WeightSpec one = WeightSpec::constant({-3, 3});
    for (int i = 0; i < 25; ++i) {
        double t_lo = oracle::urand(rng, -3, 2);
        double t_hi = t_lo + oracle::urand(rng, 0.2, 1.0);
        double s_lo = oracle::urand(rng, -3, 2);
        double s_hi = s_lo + oracle::urand(rng, 0.2, 1.0);
        SubRect sub{{t_lo, t_hi}, {s_lo, s_hi}};
        double x = oracle::urand(rng, t_lo, t_hi);
        double y = oracle::urand(rng, s_lo, s_hi);
        double m_a = t_hi - t_lo, m_b = s_hi - s_lo;
        double factor_t = 0.25 * m_a * m_a + (x - 0.5 * (t_lo + t_hi)) * (x - 0.5 * (t_lo + t_hi));
        double factor_s = 0.25 * m_b * m_b + (y - 0.5 * (s_lo + s_hi)) * (y - 0.5 * (s_lo + s_hi));
        double lhs = ow::bound(one, sub, {x, y}, 1.0) * m_a * m_b;
        CHECK(std::fabs(lhs - factor_t * factor_s) <= 1e-10);
    }
}

TEST_CASE("identical verification calls are deterministic") {
    Expression f = parse_ts("t*s*sin(t+s)");
    WeightSpec w = WeightSpec::linear({0.25, 2});
    SubRect sub{{0.25, 2}, {0.25, 2}};
    ow::BoundReport a = ow::verify(f, w, sub, {0.8, 1.1});
    ow::BoundReport b = ow::verify(f, w, sub, {0.8, 1.1});
    CHECK(a.defect == b.defect);
    CHECK(a.bound == b.bound);
    CHECK(a.quad_evaluations == b.quad_evaluations);
}

TEST_CASE("geometry preconditions") {
    Expression f = parse_ts("t*s");
    WeightSpec one = WeightSpec::constant({0, 1});
    SubRect unit{{0, 1}, {0, 1}};
    CHECK_THROWS_AS(ow::verify(f, one, unit, {1.5, 0.5}), ow::PreconditionError);
    CHECK_THROWS_AS(ow::validate_point({0.5, -0.1}, unit), ow::PreconditionError);
    CHECK_THROWS_AS(ow::validate_subrect({{0.5, 0.4}, {0, 1}}, {{0, 1}, {0, 1}}),
                    ow::PreconditionError);
    CHECK_THROWS_AS(ow::validate_subrect({{-0.1, 0.4}, {0, 1}}, {{0, 1}, {0, 1}}),
                    ow::PreconditionError);
}

TEST_CASE("mixed partial helper: symbolic when possible, differences otherwise") {
    ow::MixedPartial sym(parse_ts("t^2*s^2"));
    CHECK(sym.symbolic());
    CHECK(std::fabs(sym(0.5, 0.5) - 1.0) <= 1e-12);

    ow::MixedPartial num(parse_ts("abs(t)*s"));
    CHECK_FALSE(num.symbolic());
    CHECK(std::fabs(num(1.0, 1.0) - 1.0) <= 1e-6);

    ow::MixedPartial frac(parse_ts("t^2.5*s"));
    CHECK_FALSE(frac.symbolic()); // non-integer exponent forces the fallback
    CHECK(std::fabs(frac(1.0, 1.0) - 2.5) <= 1e-5);
}
