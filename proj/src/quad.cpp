#include "ow/quad.hpp"

#include "ow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ow {

void validate_interval(const Interval& iv) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw PreconditionError("interval endpoints must be finite");
    if (!(iv.lo < iv.hi)) throw PreconditionError("interval must satisfy lo < hi");
}

void validate_quad_config(const QuadConfig& cfg) {
    if (!(cfg.abs_tol > 0.0) || !std::isfinite(cfg.abs_tol))
        throw PreconditionError("abs_tol must be positive and finite");
    if (!(cfg.rel_tol > 0.0) || !std::isfinite(cfg.rel_tol))
        throw PreconditionError("rel_tol must be positive and finite");
    if (cfg.max_depth < 1) throw PreconditionError("max_depth must be at least 1");
    if (!(cfg.min_cell_width > 0.0)) throw PreconditionError("min_cell_width must be positive");
}

namespace {

// Gauss 7 / Kronrod 15 on [-1, 1]. Kronrod abscissae; odd indices are the
// embedded Gauss points.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double kronrod;
    double error;
};

template <typename F>
Panel gk15(const F& f, double lo, double hi, long long& evaluations) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    ++evaluations;

    for (int j = 0; j < 7; ++j) {
        const double abscissa = half * kXgk[j];
        const double f1 = f(center - abscissa);
        const double f2 = f(center + abscissa);
        evaluations += 2;
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
    }

    return {result_kronrod * half, std::fabs((result_kronrod - result_gauss) * half)};
}

struct Segment {
    double lo, hi;
    Panel panel;
    int depth;
};

// Depth-first bisection, left child first, so the evaluation sequence is a
// pure function of the integrand and the interval.
template <typename F>
QuadResult integrate_adaptive(const F& f, Interval iv, const QuadConfig& cfg) {
    long long evaluations = 0;
    Panel root = gk15(f, iv.lo, iv.hi, evaluations);

    std::vector<Segment> stack;
    stack.push_back({iv.lo, iv.hi, root, 0});

    double value = 0.0;
    double error = 0.0;
    bool converged = true;

    while (!stack.empty()) {
        Segment seg = stack.back();
        stack.pop_back();

        const double width = seg.hi - seg.lo;
        const double budget =
            std::max(cfg.abs_tol * (width / iv.width()), cfg.rel_tol * std::fabs(seg.panel.kronrod));
        const bool splittable = seg.depth < cfg.max_depth && width > 2.0 * cfg.min_cell_width;

        if (seg.panel.error <= budget || !splittable) {
            if (seg.panel.error > budget) converged = false;
            value += seg.panel.kronrod;
            error += seg.panel.error;
            continue;
        }

        const double mid = 0.5 * (seg.lo + seg.hi);
        Panel left = gk15(f, seg.lo, mid, evaluations);
        Panel right = gk15(f, mid, seg.hi, evaluations);
        // push right first so the left half is processed first
        stack.push_back({mid, seg.hi, right, seg.depth + 1});
        stack.push_back({seg.lo, mid, left, seg.depth + 1});
    }

    return {value, error, evaluations, converged};
}

} // namespace

QuadResult integrate_1d(const std::function<double(double)>& f, Interval iv,
                        const QuadConfig& cfg) {
    validate_interval(iv);
    validate_quad_config(cfg);
    return integrate_adaptive(f, iv, cfg);
}

QuadResult integrate_2d(const std::function<double(double, double)>& f, Interval t_iv,
                        Interval s_iv, const QuadConfig& cfg) {
    validate_interval(t_iv);
    validate_interval(s_iv);
    validate_quad_config(cfg);

    // Tensorized: the outer integrand is itself an adaptive integral over s,
    // run at a tighter tolerance so inner noise stays below the outer budget.
    QuadConfig inner_cfg = cfg;
    inner_cfg.abs_tol = cfg.abs_tol * 0.1;
    inner_cfg.rel_tol = cfg.rel_tol * 0.1;

    long long inner_evaluations = 0;
    bool inner_converged = true;

    auto outer = [&](double t) {
        QuadResult r = integrate_adaptive([&](double s) { return f(t, s); }, s_iv, inner_cfg);
        inner_evaluations += r.evaluations;
        inner_converged = inner_converged && r.converged;
        return r.value;
    };

    QuadResult result = integrate_adaptive(outer, t_iv, cfg);
    result.evaluations = inner_evaluations;
    result.converged = result.converged && inner_converged;
    return result;
}

} // namespace ow
