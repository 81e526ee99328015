#include "ow/cubature.hpp"

#include "ow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

namespace ow {

namespace {

// Sup-norm grids shrink with depth: the root gets the full-resolution scan,
// deep cells are small enough that a coarse grid plus the golden refinement
// resolves the maximum.
int sup_grid_for_depth(int depth) {
    if (depth == 0) return 201;
    if (depth <= 3) return 33;
    if (depth <= 5) return 9;
    return 5;
}

struct PoolEntry {
    double bound;
    long long seq;
    std::size_t slot;
};

struct WorstFirst {
    bool operator()(const PoolEntry& a, const PoolEntry& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.seq > b.seq; // oldest first on ties
    }
};

struct RuleEval {
    double value = 0.0;
    long long evaluations = 0;
};

RuleEval eval_rule(const Expression& f, const WeightSpec& w, const SubRect& rect,
                   const EvalPoint& center, const MomentSet& moments, const QuadConfig& cfg) {
    QuadResult rt = integrate_1d(
        [&](double t) {
            double args[2] = {t, center.y};
            return w(t) * f.eval(args);
        },
        rect.t_sub, cfg);

    QuadResult rs = integrate_1d(
        [&](double s) {
            double args[2] = {center.x, s};
            return w(s) * f.eval(args);
        },
        rect.s_sub, cfg);

    double args[2] = {center.x, center.y};
    RuleEval out;
    out.value = moments.m_beta * rt.value + moments.m_alpha * rs.value -
                moments.m_alpha * moments.m_beta * f.eval(args);
    out.evaluations = rt.evaluations + rs.evaluations + 1;
    return out;
}

} // namespace

double cell_rule(const Expression& f, const WeightSpec& w, const Cell& cell,
                 const QuadConfig& cfg) {
    validate_point(cell.center, cell.rect);
    return eval_rule(f, w, cell.rect, cell.center, cell.moments, cfg).value;
}

double cell_error_bound(const Cell& cell) {
    return cell.moments.A * cell.moments.B * cell.m_cell;
}

Cell make_cell(const Expression& f, const MixedPartial& fts, const WeightSpec& w,
               const SubRect& rect, const QuadConfig& cfg, int sup_grid, int depth,
               long long seq, double parent_m) {
    Cell cell;
    cell.rect = rect;
    cell.depth = depth;
    cell.seq = seq;
    cell.sup_grid = sup_grid;

    cell.center.x = w.weighted_median(rect.t_sub, cfg);
    cell.center.y = w.weighted_median(rect.s_sub, cfg);
    cell.moments = compute_moments(w, rect.t_sub, rect.s_sub, cell.center.x, cell.center.y, cfg);

    SupNormEstimate est = sup_norm_mixed(fts, rect, sup_grid);
    cell.m_cell = std::min(est.value, parent_m);
    cell.evaluations = est.evaluations;

    RuleEval rule = eval_rule(f, w, rect, cell.center, cell.moments, cfg);
    cell.local_value = rule.value;
    cell.evaluations += rule.evaluations;

    cell.local_bound = cell_error_bound(cell);
    return cell;
}

CubatureResult integrate(const Expression& f, const WeightSpec& w, const Rect& rect,
                         double target_error, long long max_cells, const QuadConfig& cfg) {
    validate_rect(rect);
    validate_quad_config(cfg);
    if (!(target_error > 0.0)) throw PreconditionError("target error must be positive");
    if (max_cells < 1) throw PreconditionError("cell budget must be at least 1");

    MixedPartial fts(f);

    std::vector<Cell> leaves;
    leaves.reserve(1024);

    long long next_seq = 0;
    long long total_evaluations = 0;

    leaves.push_back(make_cell(f, fts, w, {rect.t_iv, rect.s_iv}, cfg, sup_grid_for_depth(0), 0,
                               next_seq++, std::numeric_limits<double>::infinity()));
    total_evaluations += leaves.back().evaluations;

    std::priority_queue<PoolEntry, std::vector<PoolEntry>, WorstFirst> pool;
    pool.push({leaves[0].local_bound, leaves[0].seq, 0});

    double total_bound = leaves[0].local_bound;

    while (total_bound > target_error && static_cast<long long>(leaves.size()) < max_cells &&
           !pool.empty()) {
        PoolEntry worst = pool.top();
        pool.pop();
        const Cell parent = leaves[worst.slot];

        // Split along the side with the larger mass, at its weighted median,
        // so the children's moment products provably sum below the parent's.
        const bool split_t = parent.moments.m_alpha >= parent.moments.m_beta;
        const Interval side = split_t ? parent.rect.t_sub : parent.rect.s_sub;
        const double at = split_t ? parent.center.x : parent.center.y;
        if (at - side.lo < cfg.min_cell_width || side.hi - at < cfg.min_cell_width)
            continue; // unsplittable, stays a leaf with its bound

        SubRect lower = parent.rect;
        SubRect upper = parent.rect;
        if (split_t) {
            lower.t_sub = {side.lo, at};
            upper.t_sub = {at, side.hi};
        } else {
            lower.s_sub = {side.lo, at};
            upper.s_sub = {at, side.hi};
        }

        const int grid = sup_grid_for_depth(parent.depth + 1);
        Cell a = make_cell(f, fts, w, lower, cfg, grid, parent.depth + 1, next_seq++, parent.m_cell);
        Cell b = make_cell(f, fts, w, upper, cfg, grid, parent.depth + 1, next_seq++, parent.m_cell);
        total_evaluations += a.evaluations + b.evaluations;
        total_bound += a.local_bound + b.local_bound - parent.local_bound;

        leaves[worst.slot] = std::move(a);
        pool.push({leaves[worst.slot].local_bound, leaves[worst.slot].seq, worst.slot});
        leaves.push_back(std::move(b));
        pool.push({leaves.back().local_bound, leaves.back().seq, leaves.size() - 1});
    }

    // Fixed-order reduction by creation sequence, independent of pool history.
    std::vector<std::size_t> order(leaves.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return leaves[i].seq < leaves[j].seq; });

    CubatureResult result;
    result.cells = static_cast<long long>(leaves.size());
    result.evaluations = total_evaluations;
    result.sup_grid_coarsest = leaves[0].sup_grid;
    for (std::size_t idx : order) {
        result.value += leaves[idx].local_value;
        result.error_bound += leaves[idx].local_bound;
        result.sup_grid_coarsest = std::min(result.sup_grid_coarsest, leaves[idx].sup_grid);
    }
    result.converged = result.error_bound <= target_error;
    return result;
}

} // namespace ow
