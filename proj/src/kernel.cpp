#include "ow/kernel.hpp"

#include "ow/errors.hpp"

#include <cmath>
#include <utility>

namespace ow {

Kernel::Kernel(WeightSpec weight, Interval iv, double split, QuadConfig cfg)
    : weight_(std::move(weight)), iv_(iv), split_(split), cfg_(cfg) {
    validate_interval(iv_);
    validate_quad_config(cfg_);
    if (!weight_.domain().contains(iv_))
        throw PreconditionError("kernel interval must lie inside the weight domain");
    if (!(iv_.lo <= split_ && split_ <= iv_.hi))
        throw PreconditionError("kernel split must lie inside the interval");
}

double Kernel::operator()(double t) const {
    if (!(iv_.lo <= t && t <= iv_.hi))
        throw PreconditionError("kernel argument must lie inside the interval");
    double c = weight_.cumulative(iv_, t, cfg_);
    if (t < split_) return c;
    return c - weight_.cumulative(iv_, iv_.hi, cfg_);
}

double Kernel::abs_integral() const {
    // Both branches have constant sign, so integrate |p| piecewise with the
    // kink as a panel boundary.
    double total = 0.0;
    if (split_ > iv_.lo)
        total += integrate_1d([this](double t) { return std::fabs((*this)(t)); },
                              {iv_.lo, split_}, cfg_).value;
    if (split_ < iv_.hi)
        total += integrate_1d([this](double t) { return std::fabs((*this)(t)); },
                              {split_, iv_.hi}, cfg_).value;
    return total;
}

} // namespace ow
