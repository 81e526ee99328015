#pragma once

#include <optional>
#include <vector>

#include "ow/expr.hpp"
#include "ow/kernel.hpp"
#include "ow/quad.hpp"
#include "ow/weight.hpp"

namespace ow {

struct Rect {
    Interval t_iv; // [a,b]
    Interval s_iv; // [c,d]
};

struct SubRect {
    Interval t_sub; // [alpha1, alpha2]
    Interval s_sub; // [beta1, beta2]
};

struct EvalPoint {
    double x = 0.0;
    double y = 0.0;
};

void validate_rect(const Rect& r);
// sub must lie inside parent with positive widths.
void validate_subrect(const SubRect& sub, const Rect& parent);
// p must lie inside sub.
void validate_point(const EvalPoint& p, const SubRect& sub);

// Verification slack absorbing quadrature noise and the grid sup-norm
// under-estimate: satisfied <=> defect <= bound*(1+REL) + ABS.
inline constexpr double kVerifySlackRel = 1e-8;
inline constexpr double kVerifySlackAbs = 1e-9;

enum class SupNormMethod : std::uint8_t { SymbolicGrid, NumericGrid, UserOverride };

const char* sup_norm_method_name(SupNormMethod m);

struct SupNormEstimate {
    double value = 0.0;
    SupNormMethod method = SupNormMethod::SymbolicGrid;
    long long evaluations = 0;
};

// d2f/dtds as a callable: the symbolic derivative when the tree supports it,
// otherwise a central finite-difference stencil (h = 1e-4) on f itself.
class MixedPartial {
public:
    explicit MixedPartial(const Expression& f);
    double operator()(double t, double s) const;
    bool symbolic() const { return symbolic_.has_value(); }

    static constexpr double kFdStep = 1e-4;

private:
    Expression f_;
    std::optional<Expression> symbolic_;
};

struct BoundReport {
    EvalPoint point;
    SubRect subrect;
    MomentSet moments;
    double sup_norm = 0.0;
    SupNormMethod sup_norm_method = SupNormMethod::SymbolicGrid;
    double defect = 0.0;
    double bound = 0.0;
    double ratio = 0.0; // defect/bound, 0 for the 0/0 case
    bool satisfied = false;
    bool quad_converged = true;
    long long quad_evaluations = 0;
};

struct IdentityResult {
    double residual = 0.0;
    bool converged = true;
    long long evaluations = 0;
};

struct DefectResult {
    double value = 0.0;
    bool converged = true;
    long long evaluations = 0;
};

// |LHS - RHS| of the integral identity on sub at p: f(x,y) against the two
// weighted line averages, the normalized double integral and the normalized
// kernel double integral (quadrature split at x in t and at y in s).
IdentityResult identity_residual(const Expression& f, const WeightSpec& w, const SubRect& sub,
                                 const EvalPoint& p, const QuadConfig& cfg = {});

// | f(x,y) - (1/m_a) int w f(.,y) - (1/m_b) int w f(x,.)
//          + (1/(m_a m_b)) iint w w f |
DefectResult defect(const Expression& f, const WeightSpec& w, const SubRect& sub,
                    const EvalPoint& p, const QuadConfig& cfg = {});

// Max of |d2f/dtds| over an n x n grid on sub, then one golden-section pass
// around the grid argmax in each axis. A lower estimate of the true sup.
SupNormEstimate sup_norm_mixed(const Expression& f, const SubRect& sub, int grid_n = 201);

// Same search over an already-built mixed partial (one symbolic derivation,
// many rectangles).
SupNormEstimate sup_norm_mixed(const MixedPartial& fts, const SubRect& sub, int grid_n = 201);

// A(x) B(y) M / (m_alpha m_beta).
double bound(const WeightSpec& w, const SubRect& sub, const EvalPoint& p, double M,
             const QuadConfig& cfg = {});

enum class ConstantCase : std::uint8_t { W1Midpoint, W1Subrect, WuMidpoint };

struct ConstantPair {
    double paper_value = 0.0;   // the printed closed form
    double derived_value = 0.0; // bound() with the matching weight, midpoint, M=1
    bool mismatch = false;      // |paper - derived| > 1e-9
};

// Both the printed closed-form constant and the one recomputed from bound(),
// side by side; discrepancies are reported, never patched over.
// WuMidpoint requires rect.lo coordinates >= 0. The evaluation point is the
// midpoint of the full rect (also for W1Subrect).
ConstantPair closed_form_constant(ConstantCase c, const Rect& rect, const SubRect& sub);

BoundReport verify(const Expression& f, const WeightSpec& w, const SubRect& sub,
                   const EvalPoint& p, const QuadConfig& cfg = {},
                   std::optional<double> sup_norm_override = {});

// verify() on an nx x ny uniform lattice of interior points,
// x_i = lo + (i+1) width/(nx+1); row-major, x slowest. Requires nx, ny >= 2.
std::vector<BoundReport> sweep(const Expression& f, const WeightSpec& w, const SubRect& sub,
                               int nx, int ny, const QuadConfig& cfg = {},
                               std::optional<double> sup_norm_override = {});

} // namespace ow
