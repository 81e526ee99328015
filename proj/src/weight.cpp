#include "ow/weight.hpp"

#include "ow/errors.hpp"

#include <cmath>
#include <utility>

namespace ow {

namespace {

constexpr int kValidationSamples = 1001;
constexpr double kMedianBracketWidth = 1e-12;

void require_inside(Interval iv, Interval domain) {
    validate_interval(iv);
    if (!domain.contains(iv))
        throw PreconditionError("query interval must lie inside the weight domain");
}

} // namespace

WeightSpec::WeightSpec(WeightKind kind, MomentMode mode, Interval domain,
                       std::optional<Expression> expr, std::string selector)
    : kind_(kind), mode_(mode), domain_(domain), expr_(std::move(expr)),
      selector_(std::move(selector)) {
    validate_interval(domain_);
    validate();
}

WeightSpec WeightSpec::constant(Interval domain, MomentMode mode) {
    return WeightSpec(WeightKind::Constant, mode, domain, std::nullopt, "const");
}

WeightSpec WeightSpec::linear(Interval domain, MomentMode mode) {
    return WeightSpec(WeightKind::Linear, mode, domain, std::nullopt, "linear");
}

WeightSpec WeightSpec::expression(Expression w_of_u, Interval domain) {
    std::string selector = "expr:" + w_of_u.to_string();
    return WeightSpec(WeightKind::Expr, MomentMode::Numeric, domain, std::move(w_of_u),
                      std::move(selector));
}

WeightSpec WeightSpec::from_selector(std::string_view selector, Interval domain) {
    if (selector == "const") return constant(domain);
    if (selector == "linear") return linear(domain);
    constexpr std::string_view prefix = "expr:";
    if (selector.substr(0, prefix.size()) == prefix) {
        std::string_view text = selector.substr(prefix.size());
        Expression w = Expression::parse(text, {"u"});
        WeightSpec spec = expression(std::move(w), domain);
        spec.selector_ = std::string(selector);
        return spec;
    }
    throw InvalidWeightError("unknown weight selector '" + std::string(selector) +
                             "' (expected const, linear, or expr:<text>)");
}

void WeightSpec::validate() const {
    if (kind_ == WeightKind::Linear && domain_.lo < 0.0)
        throw InvalidWeightError("linear weight requires a domain with lo >= 0");

    double min_value = 0.0;
    for (int i = 0; i < kValidationSamples; ++i) {
        double u = domain_.lo + domain_.width() * i / (kValidationSamples - 1);
        double v;
        try {
            v = (*this)(u);
        } catch (const EvalDomainError& e) {
            throw InvalidWeightError(std::string("weight evaluation failed over its domain: ") +
                                     e.what());
        }
        if (!std::isfinite(v))
            throw InvalidWeightError("weight is not finite over its domain");
        min_value = std::min(min_value, v);
    }
    if (min_value < 0.0)
        throw InvalidWeightError("weight must be nonnegative over its domain");

    double total = mass(domain_);
    if (!std::isfinite(total) || total <= 0.0)
        throw InvalidWeightError("weight must have positive finite mass over its domain");
}

double WeightSpec::operator()(double u) const {
    switch (kind_) {
    case WeightKind::Constant: return 1.0;
    case WeightKind::Linear: return u;
    case WeightKind::Expr: {
        double args[1] = {u};
        return expr_->eval(args);
    }
    }
    return 0.0;
}

double WeightSpec::mass(Interval iv, const QuadConfig& cfg) const {
    require_inside(iv, domain_);
    double result = 0.0;
    if (mode_ == MomentMode::ClosedForm && kind_ == WeightKind::Constant) {
        result = iv.hi - iv.lo;
    } else if (mode_ == MomentMode::ClosedForm && kind_ == WeightKind::Linear) {
        result = 0.5 * (iv.hi * iv.hi - iv.lo * iv.lo);
    } else {
        result = integrate_1d([this](double u) { return (*this)(u); }, iv, cfg).value;
    }
    if (!std::isfinite(result) || result <= 0.0)
        throw InvalidWeightError("weight mass over the queried interval is not positive");
    return result;
}

double WeightSpec::abs_moment(Interval iv, double x, const QuadConfig& cfg) const {
    require_inside(iv, domain_);
    if (!(iv.lo <= x && x <= iv.hi))
        throw PreconditionError("moment point must lie inside the interval");

    if (mode_ == MomentMode::ClosedForm && kind_ == WeightKind::Constant) {
        double l = x - iv.lo;
        double r = iv.hi - x;
        return 0.5 * (l * l + r * r);
    }
    if (mode_ == MomentMode::ClosedForm && kind_ == WeightKind::Linear) {
        // int_lo^x (x-u)u du + int_x^hi (u-x)u du, antiderivatives expanded
        double x3 = x * x * x;
        double lo2 = iv.lo * iv.lo;
        double hi2 = iv.hi * iv.hi;
        return x3 / 3.0 + lo2 * iv.lo / 3.0 + hi2 * iv.hi / 3.0 - 0.5 * x * (lo2 + hi2);
    }

    double left = 0.0, right = 0.0;
    if (x > iv.lo)
        left = integrate_1d([this, x](double u) { return (x - u) * (*this)(u); },
                            {iv.lo, x}, cfg).value;
    if (x < iv.hi)
        right = integrate_1d([this, x](double u) { return (u - x) * (*this)(u); },
                             {x, iv.hi}, cfg).value;
    return left + right;
}

double WeightSpec::cumulative(Interval iv, double t, const QuadConfig& cfg) const {
    require_inside(iv, domain_);
    if (!(iv.lo <= t && t <= iv.hi))
        throw PreconditionError("cumulative point must lie inside the interval");
    if (t == iv.lo) return 0.0;
    if (mode_ == MomentMode::ClosedForm && kind_ == WeightKind::Constant) return t - iv.lo;
    if (mode_ == MomentMode::ClosedForm && kind_ == WeightKind::Linear)
        return 0.5 * (t * t - iv.lo * iv.lo);
    return integrate_1d([this](double u) { return (*this)(u); }, {iv.lo, t}, cfg).value;
}

double WeightSpec::weighted_median(Interval iv, const QuadConfig& cfg) const {
    double half = 0.5 * mass(iv, cfg);
    // Leftmost point where the cumulative mass reaches half; plateaus of zero
    // weight collapse to their left edge.
    double lo = iv.lo, hi = iv.hi;
    while (hi - lo > kMedianBracketWidth) {
        double mid = 0.5 * (lo + hi);
        if (cumulative(iv, mid, cfg) >= half)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

MomentSet compute_moments(const WeightSpec& w, Interval t_iv, Interval s_iv, double x, double y,
                          const QuadConfig& cfg) {
    return {w.mass(t_iv, cfg), w.mass(s_iv, cfg), w.abs_moment(t_iv, x, cfg),
            w.abs_moment(s_iv, y, cfg)};
}

} // namespace ow
