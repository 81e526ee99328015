#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ow/expr.hpp"
#include "ow/quad.hpp"

namespace ow {

enum class WeightKind : std::uint8_t { Constant, Linear, Expr };
enum class MomentMode : std::uint8_t { ClosedForm, Numeric };

// A validated nonnegative weight w(u) over a fixed domain. Validation at
// construction: w >= 0 and finite on a 1001-point grid over the domain,
// total mass finite and > 0, and domain.lo >= 0 for the linear builtin.
// Immutable afterwards; all queries are pure.
class WeightSpec {
public:
    static WeightSpec constant(Interval domain, MomentMode mode = MomentMode::ClosedForm);
    static WeightSpec linear(Interval domain, MomentMode mode = MomentMode::ClosedForm);
    static WeightSpec expression(Expression w_of_u, Interval domain);

    // "const" | "linear" | "expr:<text>", the CLI selector syntax.
    static WeightSpec from_selector(std::string_view selector, Interval domain);

    double operator()(double u) const;

    // m(iv) = integral of w over iv. Throws PreconditionError if iv is not
    // inside the domain, InvalidWeightError if the result is not positive.
    double mass(Interval iv, const QuadConfig& cfg = {}) const;

    // A(x) = int_{lo}^{x} (x-u) w(u) du + int_{x}^{hi} (u-x) w(u) du.
    // Requires iv.lo <= x <= iv.hi.
    double abs_moment(Interval iv, double x, const QuadConfig& cfg = {}) const;

    // Leftmost x* with int_{lo}^{x*} w = mass(iv)/2, by bisection to a
    // bracket of width 1e-12. Minimizes abs_moment over iv.
    double weighted_median(Interval iv, const QuadConfig& cfg = {}) const;

    // C(t) = int_{iv.lo}^{t} w(u) du for t in iv.
    double cumulative(Interval iv, double t, const QuadConfig& cfg = {}) const;

    Interval domain() const { return domain_; }
    WeightKind kind() const { return kind_; }
    MomentMode mode() const { return mode_; }
    const std::string& selector() const { return selector_; }

private:
    WeightSpec(WeightKind kind, MomentMode mode, Interval domain,
               std::optional<Expression> expr, std::string selector);
    void validate() const;

    WeightKind kind_;
    MomentMode mode_;
    Interval domain_;
    std::optional<Expression> expr_; // Expr kind only, over variable u
    std::string selector_;
};

// The four numbers the defect bound is built from: subinterval masses and
// absolute first moments at the evaluation point.
struct MomentSet {
    double m_alpha = 0.0; // mass over the t-subinterval
    double m_beta = 0.0;  // mass over the s-subinterval
    double A = 0.0;       // abs_moment over the t-subinterval at x
    double B = 0.0;       // abs_moment over the s-subinterval at y
};

MomentSet compute_moments(const WeightSpec& w, Interval t_iv, Interval s_iv, double x, double y,
                          const QuadConfig& cfg = {});

} // namespace ow
