#pragma once

#include "ow/quad.hpp"
#include "ow/weight.hpp"

namespace ow {

// The piecewise kernel p(split, .) over iv:
//
//   p(t) = int_{iv.lo}^{t} w(u) du   for iv.lo <= t <  split   (>= 0)
//   p(t) = int_{iv.hi}^{t} w(u) du   for split  <= t <= iv.hi  (<= 0)
//
// The boundary t == split takes the second branch. Requires iv inside the
// weight's domain and split inside iv.
class Kernel {
public:
    Kernel(WeightSpec weight, Interval iv, double split, QuadConfig cfg = {});

    // Pointwise kernel value; t must lie in iv.
    double operator()(double t) const;

    // int_{iv} |p(t)| dt, quadrature split at the kink. Equals
    // abs_moment(w, iv, split) for nonnegative weights.
    double abs_integral() const;

    Interval interval() const { return iv_; }
    double split() const { return split_; }
    const WeightSpec& weight() const { return weight_; }

private:
    WeightSpec weight_;
    Interval iv_;
    double split_;
    QuadConfig cfg_;
};

} // namespace ow
