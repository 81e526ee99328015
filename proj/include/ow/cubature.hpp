#pragma once

#include "ow/expr.hpp"
#include "ow/ostrowski.hpp"
#include "ow/quad.hpp"
#include "ow/weight.hpp"

namespace ow {

// One leaf of the subdivision: a subrectangle with its weighted-median
// center, moments, the three-term rule value and the per-cell certificate
// local_bound = A * B * M_cell (un-normalized form of the inequality).
struct Cell {
    SubRect rect;
    EvalPoint center; // weighted medians of the two sides
    MomentSet moments;
    double local_value = 0.0;
    double local_bound = 0.0;
    double m_cell = 0.0; // sup-norm estimate of the mixed partial on the cell
    int sup_grid = 0;    // grid resolution used for m_cell
    int depth = 0;
    long long seq = 0;             // creation order, breaks worst-first ties
    long long evaluations = 0;     // f/mixed-partial evaluations spent on this cell
};

struct CubatureResult {
    double value = 0.0;
    double error_bound = 0.0; // sum of final local_bounds
    long long cells = 0;
    long long evaluations = 0;
    bool converged = false;
    int sup_grid_coarsest = 0; // coarsest sup-norm grid used on any cell
};

// Three-term rule for iint_cell w(t)w(s) f(t,s):
//   m_beta * int w(t) f(t,y) dt + m_alpha * int w(s) f(x,s) ds
//   - m_alpha m_beta f(x,y)
// with (x,y) the cell center. Exact when the mixed partial vanishes.
double cell_rule(const Expression& f, const WeightSpec& w, const Cell& cell,
                 const QuadConfig& cfg = {});

// A(x) B(y) M_cell; monotone under median subdivision.
double cell_error_bound(const Cell& cell);

// Builds a fully-populated cell. parent_m clamps the sup-norm estimate
// (the sup over a subset never exceeds the parent's).
Cell make_cell(const Expression& f, const MixedPartial& fts, const WeightSpec& w,
               const SubRect& rect, const QuadConfig& cfg, int sup_grid, int depth,
               long long seq, double parent_m);

// Worst-first adaptive cubature of iint_rect w(t)w(s) f(t,s) dt ds with the
// per-cell inequality as the error certificate. The worst cell (largest
// local_bound, oldest on ties) is split at the weighted median of its
// larger-mass side until the summed bounds reach target_error or the cell
// budget runs out. Deterministic: fixed-order tree growth and final sum.
CubatureResult integrate(const Expression& f, const WeightSpec& w, const Rect& rect,
                         double target_error, long long max_cells, const QuadConfig& cfg = {});

} // namespace ow
