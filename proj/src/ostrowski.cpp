#include "ow/ostrowski.hpp"

#include "ow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ow {

void validate_rect(const Rect& r) {
    validate_interval(r.t_iv);
    validate_interval(r.s_iv);
}

void validate_subrect(const SubRect& sub, const Rect& parent) {
    validate_interval(sub.t_sub);
    validate_interval(sub.s_sub);
    validate_rect(parent);
    if (!parent.t_iv.contains(sub.t_sub) || !parent.s_iv.contains(sub.s_sub))
        throw PreconditionError("subrectangle must lie inside the parent rectangle");
}

void validate_point(const EvalPoint& p, const SubRect& sub) {
    if (!sub.t_sub.contains(p.x) || !sub.s_sub.contains(p.y))
        throw PreconditionError("evaluation point must lie inside the subrectangle");
}

const char* sup_norm_method_name(SupNormMethod m) {
    switch (m) {
    case SupNormMethod::SymbolicGrid: return "symbolic-grid";
    case SupNormMethod::NumericGrid: return "numeric-grid";
    case SupNormMethod::UserOverride: return "user-override";
    }
    return "?";
}

MixedPartial::MixedPartial(const Expression& f) : f_(f) {
    try {
        symbolic_ = f.diff("t").diff("s");
    } catch (const UnsupportedNodeError&) {
        // abs node: fall back to finite differences
    } catch (const PreconditionError&) {
        // non-integer exponent: same fallback
    }
}

double MixedPartial::operator()(double t, double s) const {
    if (symbolic_) {
        double args[2] = {t, s};
        return symbolic_->eval(args);
    }
    const double h = kFdStep;
    double pp[2] = {t + h, s + h};
    double pm[2] = {t + h, s - h};
    double mp[2] = {t - h, s + h};
    double mm[2] = {t - h, s - h};
    return (f_.eval(pp) - f_.eval(pm) - f_.eval(mp) + f_.eval(mm)) / (4.0 * h * h);
}

namespace {

// The three averages shared by defect() and identity_residual():
// t_line = (1/m_a) int w(t) f(t,y) dt over the t-subinterval,
// s_line = (1/m_b) int w(s) f(x,s) ds over the s-subinterval,
// dbl    = (1/(m_a m_b)) iint w(t) w(s) f(t,s) dt ds.
struct Averages {
    double t_line = 0.0;
    double s_line = 0.0;
    double dbl = 0.0;
    bool converged = true;
    long long evaluations = 0;
};

Averages weighted_averages(const Expression& f, const WeightSpec& w, const SubRect& sub,
                           const EvalPoint& p, const QuadConfig& cfg, double m_alpha,
                           double m_beta) {
    Averages out;

    QuadResult rt = integrate_1d(
        [&](double t) {
            double args[2] = {t, p.y};
            return w(t) * f.eval(args);
        },
        sub.t_sub, cfg);
    out.t_line = rt.value / m_alpha;

    QuadResult rs = integrate_1d(
        [&](double s) {
            double args[2] = {p.x, s};
            return w(s) * f.eval(args);
        },
        sub.s_sub, cfg);
    out.s_line = rs.value / m_beta;

    QuadResult rd = integrate_2d(
        [&](double t, double s) {
            double args[2] = {t, s};
            return w(t) * w(s) * f.eval(args);
        },
        sub.t_sub, sub.s_sub, cfg);
    out.dbl = rd.value / (m_alpha * m_beta);

    out.converged = rt.converged && rs.converged && rd.converged;
    out.evaluations = rt.evaluations + rs.evaluations + rd.evaluations;
    return out;
}

// iint P(x,t) Q(y,s) f_ts(t,s) dt ds with the quadrature split at the kernel
// kinks: up to four smooth quadrants. Factored so P is evaluated once per
// outer node.
struct KernelIntegral {
    double value = 0.0;
    bool converged = true;
    long long evaluations = 0;
};

KernelIntegral kernel_double_integral(const MixedPartial& fts, const Kernel& pk, const Kernel& qk,
                                      const SubRect& sub, const EvalPoint& p,
                                      const QuadConfig& cfg) {
    KernelIntegral out;

    QuadConfig inner_cfg = cfg;
    inner_cfg.abs_tol = cfg.abs_tol * 0.1;
    inner_cfg.rel_tol = cfg.rel_tol * 0.1;

    const Interval t_pieces[2] = {{sub.t_sub.lo, p.x}, {p.x, sub.t_sub.hi}};
    const Interval s_pieces[2] = {{sub.s_sub.lo, p.y}, {p.y, sub.s_sub.hi}};

    for (const Interval& tp : t_pieces) {
        if (!(tp.lo < tp.hi)) continue;
        for (const Interval& sp : s_pieces) {
            if (!(sp.lo < sp.hi)) continue;
            auto outer = [&](double t) {
                double pval = pk(t);
                QuadResult inner = integrate_1d(
                    [&](double s) { return qk(s) * fts(t, s); }, sp, inner_cfg);
                out.evaluations += inner.evaluations;
                out.converged = out.converged && inner.converged;
                return pval * inner.value;
            };
            QuadResult quadrant = integrate_1d(outer, tp, cfg);
            out.value += quadrant.value;
            out.converged = out.converged && quadrant.converged;
        }
    }
    return out;
}

double safe_ratio(double defect_value, double bound_value) {
    if (bound_value > 0.0) return defect_value / bound_value;
    return 0.0;
}

BoundReport verify_with_estimate(const Expression& f, const WeightSpec& w, const SubRect& sub,
                                 const EvalPoint& p, const QuadConfig& cfg,
                                 const SupNormEstimate& est) {
    validate_point(p, sub);
    MomentSet moments = compute_moments(w, sub.t_sub, sub.s_sub, p.x, p.y, cfg);
    DefectResult d = defect(f, w, sub, p, cfg);
    double b = moments.A * moments.B * est.value / (moments.m_alpha * moments.m_beta);

    BoundReport report;
    report.point = p;
    report.subrect = sub;
    report.moments = moments;
    report.sup_norm = est.value;
    report.sup_norm_method = est.method;
    report.defect = d.value;
    report.bound = b;
    report.ratio = safe_ratio(d.value, b);
    report.satisfied = d.value <= b * (1.0 + kVerifySlackRel) + kVerifySlackAbs;
    report.quad_converged = d.converged;
    report.quad_evaluations = d.evaluations;
    return report;
}

struct GoldenBest {
    double arg = 0.0;
    double value = 0.0;
};

// Golden-section maximization of g over [lo, hi]; returns the best sampled
// point. g must be continuous; this refines a bracket produced by the grid,
// so shrinking the bracket by 1e-4 pins the argmax far below the quadratic
// flatness of the peak.
template <typename G>
GoldenBest golden_max(const G& g, double lo, double hi, long long& evaluations) {
    constexpr double kInvPhi = 0.6180339887498949;
    const double stop = std::max(1e-12, 1e-4 * (hi - lo));
    GoldenBest best{lo, g(lo)};
    ++evaluations;
    double vhi = g(hi);
    ++evaluations;
    if (vhi > best.value) best = {hi, vhi};

    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double gc = g(c), gd = g(d);
    evaluations += 2;
    if (gc > best.value) best = {c, gc};
    if (gd > best.value) best = {d, gd};

    for (int i = 0; i < 100 && hi - lo > stop; ++i) {
        if (gc < gd) {
            lo = c;
            c = d;
            gc = gd;
            d = lo + kInvPhi * (hi - lo);
            gd = g(d);
            ++evaluations;
            if (gd > best.value) best = {d, gd};
        } else {
            hi = d;
            d = c;
            gd = gc;
            c = hi - kInvPhi * (hi - lo);
            gc = g(c);
            ++evaluations;
            if (gc > best.value) best = {c, gc};
        }
    }
    return best;
}

} // namespace

IdentityResult identity_residual(const Expression& f, const WeightSpec& w, const SubRect& sub,
                                 const EvalPoint& p, const QuadConfig& cfg) {
    validate_point(p, sub);
    double m_alpha = w.mass(sub.t_sub, cfg);
    double m_beta = w.mass(sub.s_sub, cfg);

    Averages av = weighted_averages(f, w, sub, p, cfg, m_alpha, m_beta);

    MixedPartial fts(f);
    Kernel pk(w, sub.t_sub, p.x, cfg);
    Kernel qk(w, sub.s_sub, p.y, cfg);
    KernelIntegral ki = kernel_double_integral(fts, pk, qk, sub, p, cfg);

    double args[2] = {p.x, p.y};
    double lhs = f.eval(args);
    double rhs = av.t_line + av.s_line - av.dbl + ki.value / (m_alpha * m_beta);

    IdentityResult out;
    out.residual = std::fabs(lhs - rhs);
    out.converged = av.converged && ki.converged;
    out.evaluations = av.evaluations + ki.evaluations;
    return out;
}

DefectResult defect(const Expression& f, const WeightSpec& w, const SubRect& sub,
                    const EvalPoint& p, const QuadConfig& cfg) {
    validate_point(p, sub);
    double m_alpha = w.mass(sub.t_sub, cfg);
    double m_beta = w.mass(sub.s_sub, cfg);

    Averages av = weighted_averages(f, w, sub, p, cfg, m_alpha, m_beta);

    double args[2] = {p.x, p.y};
    double fxy = f.eval(args);

    DefectResult out;
    out.value = std::fabs(fxy - av.t_line - av.s_line + av.dbl);
    out.converged = av.converged;
    out.evaluations = av.evaluations;
    return out;
}

SupNormEstimate sup_norm_mixed(const Expression& f, const SubRect& sub, int grid_n) {
    return sup_norm_mixed(MixedPartial(f), sub, grid_n);
}

SupNormEstimate sup_norm_mixed(const MixedPartial& fts, const SubRect& sub, int grid_n) {
    if (grid_n < 2) throw PreconditionError("sup-norm grid needs at least 2 points per axis");
    validate_interval(sub.t_sub);
    validate_interval(sub.s_sub);

    SupNormEstimate est;
    est.method = fts.symbolic() ? SupNormMethod::SymbolicGrid : SupNormMethod::NumericGrid;

    auto t_at = [&](int i) { return sub.t_sub.lo + sub.t_sub.width() * i / (grid_n - 1); };
    auto s_at = [&](int j) { return sub.s_sub.lo + sub.s_sub.width() * j / (grid_n - 1); };

    double best = -1.0;
    int bi = 0, bj = 0;
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            double v = std::fabs(fts(t_at(i), s_at(j)));
            ++est.evaluations;
            if (!std::isfinite(v))
                throw EvalDomainError("mixed partial is not finite on the rectangle", 0);
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }

    // One local refinement pass per axis around the grid argmax.
    double t_lo = t_at(std::max(0, bi - 1));
    double t_hi = t_at(std::min(grid_n - 1, bi + 1));
    double s_best = s_at(bj);
    auto along_t = [&](double t) { return std::fabs(fts(t, s_best)); };
    auto bt = golden_max(along_t, t_lo, t_hi, est.evaluations);
    double t_best = bt.value > best ? bt.arg : t_at(bi);
    best = std::max(best, bt.value);

    double s_lo = s_at(std::max(0, bj - 1));
    double s_hi = s_at(std::min(grid_n - 1, bj + 1));
    auto along_s = [&](double s) { return std::fabs(fts(t_best, s)); };
    auto bs = golden_max(along_s, s_lo, s_hi, est.evaluations);
    best = std::max(best, bs.value);

    if (!std::isfinite(best))
        throw EvalDomainError("mixed partial is not finite on the rectangle", 0);
    est.value = best;
    return est;
}

double bound(const WeightSpec& w, const SubRect& sub, const EvalPoint& p, double M,
             const QuadConfig& cfg) {
    if (!(M >= 0.0) || !std::isfinite(M))
        throw PreconditionError("sup-norm factor must be finite and nonnegative");
    validate_point(p, sub);
    MomentSet mo = compute_moments(w, sub.t_sub, sub.s_sub, p.x, p.y, cfg);
    return mo.A * mo.B * M / (mo.m_alpha * mo.m_beta);
}

ConstantPair closed_form_constant(ConstantCase c, const Rect& rect, const SubRect& sub) {
    validate_rect(rect);
    validate_subrect(sub, rect);

    const double a = rect.t_iv.lo, b = rect.t_iv.hi;
    const double cc = rect.s_iv.lo, d = rect.s_iv.hi;
    const Interval hull{std::min(a, cc), std::max(b, d)};
    const EvalPoint mid{0.5 * (a + b), 0.5 * (cc + d)};

    ConstantPair out;
    switch (c) {
    case ConstantCase::W1Midpoint: {
        out.paper_value = (b - a) * (d - cc) / 16.0;
        WeightSpec w = WeightSpec::constant(hull);
        out.derived_value = bound(w, {rect.t_iv, rect.s_iv}, mid, 1.0);
        break;
    }
    case ConstantCase::W1Subrect: {
        const double a1 = sub.t_sub.lo, a2 = sub.t_sub.hi;
        const double b1 = sub.s_sub.lo, b2 = sub.s_sub.hi;
        const double A3 = (a + b - 2.0 * a1) * (a + b - 2.0 * a1) +
                          (a + b - 2.0 * a2) * (a + b - 2.0 * a2);
        const double B3 = (cc + d - 2.0 * b1) * (cc + d - 2.0 * b1) +
                          (cc + d - 2.0 * b2) * (cc + d - 2.0 * b2);
        out.paper_value = A3 * B3 / (64.0 * (a2 - a1) * (b2 - b1));
        validate_point(mid, sub);
        WeightSpec w = WeightSpec::constant(hull);
        out.derived_value = bound(w, sub, mid, 1.0);
        break;
    }
    case ConstantCase::WuMidpoint: {
        if (a < 0.0 || cc < 0.0)
            throw PreconditionError("linear-weight constant needs nonnegative lower corners");
        out.paper_value = (a + b) * (cc + d) / 16.0;
        WeightSpec w = WeightSpec::linear(hull);
        out.derived_value = bound(w, {rect.t_iv, rect.s_iv}, mid, 1.0);
        break;
    }
    }
    out.mismatch = std::fabs(out.paper_value - out.derived_value) > 1e-9;
    return out;
}

BoundReport verify(const Expression& f, const WeightSpec& w, const SubRect& sub,
                   const EvalPoint& p, const QuadConfig& cfg,
                   std::optional<double> sup_norm_override) {
    SupNormEstimate est;
    if (sup_norm_override) {
        if (!(*sup_norm_override >= 0.0) || !std::isfinite(*sup_norm_override))
            throw PreconditionError("sup-norm override must be finite and nonnegative");
        est = {*sup_norm_override, SupNormMethod::UserOverride, 0};
    } else {
        est = sup_norm_mixed(f, sub);
    }
    return verify_with_estimate(f, w, sub, p, cfg, est);
}

std::vector<BoundReport> sweep(const Expression& f, const WeightSpec& w, const SubRect& sub,
                               int nx, int ny, const QuadConfig& cfg,
                               std::optional<double> sup_norm_override) {
    if (nx < 2 || ny < 2) throw PreconditionError("sweep grid must be at least 2x2");

    SupNormEstimate est;
    if (sup_norm_override) {
        if (!(*sup_norm_override >= 0.0) || !std::isfinite(*sup_norm_override))
            throw PreconditionError("sup-norm override must be finite and nonnegative");
        est = {*sup_norm_override, SupNormMethod::UserOverride, 0};
    } else {
        est = sup_norm_mixed(f, sub);
    }

    std::vector<BoundReport> reports;
    reports.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) {
        double x = sub.t_sub.lo + sub.t_sub.width() * (i + 1) / (nx + 1);
        for (int j = 0; j < ny; ++j) {
            double y = sub.s_sub.lo + sub.s_sub.width() * (j + 1) / (ny + 1);
            reports.push_back(verify_with_estimate(f, w, sub, {x, y}, cfg, est));
        }
    }
    return reports;
}

} // namespace ow
