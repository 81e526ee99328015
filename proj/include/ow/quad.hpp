#pragma once

#include <functional>

#include "ow/errors.hpp"

namespace ow {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Throws PreconditionError unless lo < hi and both are finite.
void validate_interval(const Interval& iv);

struct QuadConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 40;
    double min_cell_width = 1e-12;
};

void validate_quad_config(const QuadConfig& cfg);

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0; // accumulated per-panel estimates, >= 0
    long long evaluations = 0;   // integrand calls
    bool converged = false;      // error_estimate <= max(abs_tol, rel_tol*|value|)
};

// Adaptive bisection with an embedded Gauss7/Kronrod15 pair per panel.
// Kept value is the Kronrod one; the panel error estimate is |K15 - G7|.
// Panels are accepted against a width-proportional share of the tolerance.
// Deterministic for fixed inputs: left-first traversal, fixed-order sums.
// Integrands with interior kinks should be split by the caller; the engine
// does not look for them.
QuadResult integrate_1d(const std::function<double(double)>& g, Interval iv,
                        const QuadConfig& cfg = {});

// Tensorized: the inner (s) integral is the integrand of the outer (t) one,
// evaluated at a tightened tolerance. Evaluation count refers to g.
QuadResult integrate_2d(const std::function<double(double, double)>& g, Interval iv_t,
                        Interval iv_s, const QuadConfig& cfg = {});

} // namespace ow
