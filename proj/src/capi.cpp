#include "ostrowski2d.h"

#include "ow/cubature.hpp"
#include "ow/errors.hpp"
#include "ow/expr.hpp"
#include "ow/ostrowski.hpp"
#include "ow/quad.hpp"
#include "ow/weight.hpp"

#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct ow2d_expr {
    ow::Expression impl;
};

struct ow2d_weight {
    ow::WeightSpec impl;
};

namespace {

thread_local std::string g_error_message;
thread_local long long g_error_offset = -1;

void clear_error() {
    g_error_message.clear();
    g_error_offset = -1;
}

ow2d_status fail(ow2d_status code, const char* message, long long offset = -1) {
    g_error_message = message;
    g_error_offset = offset;
    return code;
}

// Runs fn() under the library's exception-to-status mapping.
template <typename Fn>
ow2d_status guarded(Fn&& fn) {
    try {
        clear_error();
        fn();
        return OW2D_OK;
    } catch (const ow::ParseError& e) {
        return fail(OW2D_ERR_PARSE, e.what(), static_cast<long long>(e.offset()));
    } catch (const ow::EvalDomainError& e) {
        return fail(OW2D_ERR_EVAL_DOMAIN, e.what(), static_cast<long long>(e.offset()));
    } catch (const ow::UnsupportedNodeError& e) {
        return fail(OW2D_ERR_UNSUPPORTED, e.what(), static_cast<long long>(e.offset()));
    } catch (const ow::InvalidWeightError& e) {
        return fail(OW2D_ERR_INVALID_WEIGHT, e.what());
    } catch (const ow::PreconditionError& e) {
        return fail(OW2D_ERR_PRECONDITION, e.what());
    } catch (const std::bad_alloc&) {
        return fail(OW2D_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(OW2D_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(OW2D_ERR_INTERNAL, "unknown error");
    }
}

ow::QuadConfig to_config(const ow2d_quad_config* cfg) {
    if (!cfg) return {};
    ow::QuadConfig out;
    out.abs_tol = cfg->abs_tol;
    out.rel_tol = cfg->rel_tol;
    out.max_depth = cfg->max_depth;
    out.min_cell_width = cfg->min_cell_width;
    return out;
}

ow::SubRect to_subrect(const double sub[4]) {
    return {{sub[0], sub[1]}, {sub[2], sub[3]}};
}

void fill_report(const ow::BoundReport& r, ow2d_bound_report* out) {
    out->x = r.point.x;
    out->y = r.point.y;
    out->m_alpha = r.moments.m_alpha;
    out->m_beta = r.moments.m_beta;
    out->big_a = r.moments.A;
    out->big_b = r.moments.B;
    out->sup_norm = r.sup_norm;
    out->sup_norm_method = static_cast<int>(r.sup_norm_method);
    out->defect = r.defect;
    out->bound = r.bound;
    out->ratio = r.ratio;
    out->satisfied = r.satisfied ? 1 : 0;
    out->quad_converged = r.quad_converged ? 1 : 0;
    out->quad_evaluations = r.quad_evaluations;
}

} // namespace

extern "C" {

const char* ow2d_version(void) { return "1.0.0"; }

ow2d_quad_config ow2d_quad_config_default(void) {
    ow::QuadConfig d;
    return {d.abs_tol, d.rel_tol, d.max_depth, d.min_cell_width};
}

const char* ow2d_last_error_message(void) { return g_error_message.c_str(); }

long long ow2d_last_error_offset(void) { return g_error_offset; }

ow2d_status ow2d_expr_parse(const char* text, const char* const* variables, int n_variables,
                            ow2d_expr** out) {
    if (!text || !variables || n_variables < 1 || !out)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "expr_parse: NULL argument or no variables");
    *out = nullptr;
    return guarded([&] {
        std::vector<std::string> names;
        names.reserve(static_cast<std::size_t>(n_variables));
        for (int i = 0; i < n_variables; ++i) {
            if (!variables[i]) throw ow::PreconditionError("variable name must not be NULL");
            names.emplace_back(variables[i]);
        }
        *out = new ow2d_expr{ow::Expression::parse(text, names)};
    });
}

void ow2d_expr_free(ow2d_expr* e) { delete e; }

ow2d_status ow2d_expr_eval(const ow2d_expr* e, const double* values, int n_values, double* out) {
    if (!e || !values || !out)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "expr_eval: NULL argument");
    return guarded([&] {
        if (n_values < static_cast<int>(e->impl.variables().size()))
            throw ow::PreconditionError("expr_eval: not enough variable values");
        *out = e->impl.eval({values, static_cast<std::size_t>(n_values)});
    });
}

ow2d_status ow2d_expr_diff(const ow2d_expr* e, const char* variable, ow2d_expr** out) {
    if (!e || !variable || !out)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "expr_diff: NULL argument");
    *out = nullptr;
    return guarded([&] { *out = new ow2d_expr{e->impl.diff(variable)}; });
}

ow2d_status ow2d_expr_to_string(const ow2d_expr* e, char** out) {
    if (!e || !out) return fail(OW2D_ERR_INVALID_ARGUMENT, "expr_to_string: NULL argument");
    *out = nullptr;
    return guarded([&] {
        std::string text = e->impl.to_string();
        char* buffer = new char[text.size() + 1];
        std::memcpy(buffer, text.c_str(), text.size() + 1);
        *out = buffer;
    });
}

void ow2d_string_free(char* s) { delete[] s; }

ow2d_status ow2d_weight_create(const char* selector, double domain_lo, double domain_hi,
                               ow2d_weight** out) {
    if (!selector || !out) return fail(OW2D_ERR_INVALID_ARGUMENT, "weight_create: NULL argument");
    *out = nullptr;
    return guarded([&] {
        *out = new ow2d_weight{ow::WeightSpec::from_selector(selector, {domain_lo, domain_hi})};
    });
}

void ow2d_weight_free(ow2d_weight* w) { delete w; }

ow2d_status ow2d_weight_mass(const ow2d_weight* w, double lo, double hi,
                             const ow2d_quad_config* cfg, double* out) {
    if (!w || !out) return fail(OW2D_ERR_INVALID_ARGUMENT, "weight_mass: NULL argument");
    return guarded([&] { *out = w->impl.mass({lo, hi}, to_config(cfg)); });
}

ow2d_status ow2d_weight_abs_moment(const ow2d_weight* w, double lo, double hi, double x,
                                   const ow2d_quad_config* cfg, double* out) {
    if (!w || !out) return fail(OW2D_ERR_INVALID_ARGUMENT, "weight_abs_moment: NULL argument");
    return guarded([&] { *out = w->impl.abs_moment({lo, hi}, x, to_config(cfg)); });
}

ow2d_status ow2d_weight_median(const ow2d_weight* w, double lo, double hi,
                               const ow2d_quad_config* cfg, double* out) {
    if (!w || !out) return fail(OW2D_ERR_INVALID_ARGUMENT, "weight_median: NULL argument");
    return guarded([&] { *out = w->impl.weighted_median({lo, hi}, to_config(cfg)); });
}

ow2d_status ow2d_verify(const ow2d_expr* f, const ow2d_weight* w, const double sub[4],
                        const double point[2], const ow2d_quad_config* cfg,
                        const double* sup_norm_override, ow2d_bound_report* out) {
    if (!f || !w || !sub || !point || !out)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "verify: NULL argument");
    return guarded([&] {
        std::optional<double> override_value;
        if (sup_norm_override) override_value = *sup_norm_override;
        ow::BoundReport r = ow::verify(f->impl, w->impl, to_subrect(sub),
                                       {point[0], point[1]}, to_config(cfg), override_value);
        fill_report(r, out);
    });
}

ow2d_status ow2d_sweep(const ow2d_expr* f, const ow2d_weight* w, const double sub[4], int nx,
                       int ny, const ow2d_quad_config* cfg, const double* sup_norm_override,
                       ow2d_bound_report* out) {
    if (!f || !w || !sub || !out) return fail(OW2D_ERR_INVALID_ARGUMENT, "sweep: NULL argument");
    return guarded([&] {
        std::optional<double> override_value;
        if (sup_norm_override) override_value = *sup_norm_override;
        std::vector<ow::BoundReport> reports =
            ow::sweep(f->impl, w->impl, to_subrect(sub), nx, ny, to_config(cfg), override_value);
        for (std::size_t i = 0; i < reports.size(); ++i) fill_report(reports[i], out + i);
    });
}

ow2d_status ow2d_identity_residual(const ow2d_expr* f, const ow2d_weight* w, const double sub[4],
                                   const double point[2], const ow2d_quad_config* cfg,
                                   double* residual, int* converged, long long* evaluations) {
    if (!f || !w || !sub || !point || !residual)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "identity_residual: NULL argument");
    return guarded([&] {
        ow::IdentityResult r = ow::identity_residual(f->impl, w->impl, to_subrect(sub),
                                                     {point[0], point[1]}, to_config(cfg));
        *residual = r.residual;
        if (converged) *converged = r.converged ? 1 : 0;
        if (evaluations) *evaluations = r.evaluations;
    });
}

ow2d_status ow2d_sup_norm(const ow2d_expr* f, const double sub[4], int grid_n, double* value,
                          int* method, long long* evaluations) {
    if (!f || !sub || !value) return fail(OW2D_ERR_INVALID_ARGUMENT, "sup_norm: NULL argument");
    return guarded([&] {
        ow::SupNormEstimate est = ow::sup_norm_mixed(f->impl, to_subrect(sub), grid_n);
        *value = est.value;
        if (method) *method = static_cast<int>(est.method);
        if (evaluations) *evaluations = est.evaluations;
    });
}

ow2d_status ow2d_closed_form_constant(int constant_case, const double rect[4],
                                      const double sub[4], ow2d_constant_pair* out) {
    if (!rect || !sub || !out)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "closed_form_constant: NULL argument");
    if (constant_case < 0 || constant_case > 2)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "closed_form_constant: unknown case");
    return guarded([&] {
        ow::Rect r{{rect[0], rect[1]}, {rect[2], rect[3]}};
        ow::ConstantPair p = ow::closed_form_constant(
            static_cast<ow::ConstantCase>(constant_case), r, to_subrect(sub));
        out->paper_value = p.paper_value;
        out->derived_value = p.derived_value;
        out->mismatch = p.mismatch ? 1 : 0;
    });
}

ow2d_status ow2d_cubature(const ow2d_expr* f, const ow2d_weight* w, const double rect[4],
                          double target_error, long long max_cells,
                          const ow2d_quad_config* cfg, ow2d_cubature_result* out) {
    if (!f || !w || !rect || !out)
        return fail(OW2D_ERR_INVALID_ARGUMENT, "cubature: NULL argument");
    return guarded([&] {
        ow::Rect r{{rect[0], rect[1]}, {rect[2], rect[3]}};
        ow::CubatureResult c =
            ow::integrate(f->impl, w->impl, r, target_error, max_cells, to_config(cfg));
        out->value = c.value;
        out->error_bound = c.error_bound;
        out->cells = c.cells;
        out->evaluations = c.evaluations;
        out->converged = c.converged ? 1 : 0;
        out->sup_grid_coarsest = c.sup_grid_coarsest;
    });
}

} // extern "C"
