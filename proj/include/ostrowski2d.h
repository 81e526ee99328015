/* ostrowski2d - weighted two-variable Ostrowski bounds over rectangles.
 *
 * C interface to the core library: expression handling, validated weights,
 * defect/bound verification, identity residuals, closed-form constants and
 * certified adaptive cubature.
 *
 * Conventions:
 *   - Rectangles are passed as double[4] = {t_lo, t_hi, s_lo, s_hi}.
 *   - Points are double[2] = {x, y}.
 *   - Every function returning ow2d_status leaves a thread-local error
 *     message (and byte offset where applicable) readable through
 *     ow2d_last_error_message() / ow2d_last_error_offset() on failure.
 *   - Handles are freed with their matching *_free function; passing NULL
 *     to a *_free is a no-op.
 */

#ifndef OSTROWSKI2D_H
#define OSTROWSKI2D_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ow2d_status {
    OW2D_OK = 0,
    OW2D_ERR_PARSE = 1,
    OW2D_ERR_EVAL_DOMAIN = 2,
    OW2D_ERR_PRECONDITION = 3,
    OW2D_ERR_INVALID_WEIGHT = 4,
    OW2D_ERR_UNSUPPORTED = 5,
    OW2D_ERR_INVALID_ARGUMENT = 6,
    OW2D_ERR_INTERNAL = 7
} ow2d_status;

typedef enum ow2d_sup_norm_method {
    OW2D_SUP_SYMBOLIC_GRID = 0,
    OW2D_SUP_NUMERIC_GRID = 1,
    OW2D_SUP_USER_OVERRIDE = 2
} ow2d_sup_norm_method;

typedef enum ow2d_constant_case {
    OW2D_CONST_W1_MIDPOINT = 0,
    OW2D_CONST_W1_SUBRECT = 1,
    OW2D_CONST_WU_MIDPOINT = 2
} ow2d_constant_case;

typedef struct ow2d_expr ow2d_expr;
typedef struct ow2d_weight ow2d_weight;

typedef struct ow2d_quad_config {
    double abs_tol;
    double rel_tol;
    int max_depth;
    double min_cell_width;
} ow2d_quad_config;

typedef struct ow2d_bound_report {
    double x;
    double y;
    double m_alpha;
    double m_beta;
    double big_a; /* absolute first moment at x over the t-subinterval */
    double big_b; /* absolute first moment at y over the s-subinterval */
    double sup_norm;
    int sup_norm_method; /* ow2d_sup_norm_method */
    double defect;
    double bound;
    double ratio;
    int satisfied;
    int quad_converged;
    long long quad_evaluations;
} ow2d_bound_report;

typedef struct ow2d_cubature_result {
    double value;
    double error_bound;
    long long cells;
    long long evaluations;
    int converged;
    int sup_grid_coarsest;
} ow2d_cubature_result;

typedef struct ow2d_constant_pair {
    double paper_value;
    double derived_value;
    int mismatch;
} ow2d_constant_pair;

/* ---- library ---------------------------------------------------------- */

const char* ow2d_version(void);

ow2d_quad_config ow2d_quad_config_default(void);

/* Message/offset of the most recent failure on this thread. The message is
 * valid until the next failing call; offset is -1 when not applicable. */
const char* ow2d_last_error_message(void);
long long ow2d_last_error_offset(void);

/* ---- expressions ------------------------------------------------------ */

/* Parses `text` over the given ordered variable names. */
ow2d_status ow2d_expr_parse(const char* text, const char* const* variables, int n_variables,
                            ow2d_expr** out);

void ow2d_expr_free(ow2d_expr* e);

/* values[i] binds the i-th declared variable. */
ow2d_status ow2d_expr_eval(const ow2d_expr* e, const double* values, int n_values, double* out);

/* Exact partial derivative; fails with OW2D_ERR_UNSUPPORTED on abs() and
 * OW2D_ERR_PRECONDITION on non-integer exponents. */
ow2d_status ow2d_expr_diff(const ow2d_expr* e, const char* variable, ow2d_expr** out);

/* Re-parseable text form. *out is heap-allocated; release it with
 * ow2d_string_free. */
ow2d_status ow2d_expr_to_string(const ow2d_expr* e, char** out);

void ow2d_string_free(char* s);

/* ---- weights ---------------------------------------------------------- */

/* selector: "const", "linear" or "expr:<text over u>"; the weight is
 * validated (nonnegative samples, positive mass) over [domain_lo, domain_hi]. */
ow2d_status ow2d_weight_create(const char* selector, double domain_lo, double domain_hi,
                               ow2d_weight** out);

void ow2d_weight_free(ow2d_weight* w);

ow2d_status ow2d_weight_mass(const ow2d_weight* w, double lo, double hi,
                             const ow2d_quad_config* cfg, double* out);

ow2d_status ow2d_weight_abs_moment(const ow2d_weight* w, double lo, double hi, double x,
                                   const ow2d_quad_config* cfg, double* out);

ow2d_status ow2d_weight_median(const ow2d_weight* w, double lo, double hi,
                               const ow2d_quad_config* cfg, double* out);

/* ---- verification ----------------------------------------------------- */

/* Defect, bound and moments of f at `point` inside `sub`. A non-NULL
 * sup_norm_override replaces the grid estimate of the mixed-partial sup. */
ow2d_status ow2d_verify(const ow2d_expr* f, const ow2d_weight* w, const double sub[4],
                        const double point[2], const ow2d_quad_config* cfg,
                        const double* sup_norm_override, ow2d_bound_report* out);

/* verify at an nx-by-ny lattice of interior points (row-major, x slowest).
 * `out` must hold nx*ny reports. nx, ny >= 2. */
ow2d_status ow2d_sweep(const ow2d_expr* f, const ow2d_weight* w, const double sub[4], int nx,
                       int ny, const ow2d_quad_config* cfg, const double* sup_norm_override,
                       ow2d_bound_report* out);

/* |LHS - RHS| of the underlying integral identity at `point`. */
ow2d_status ow2d_identity_residual(const ow2d_expr* f, const ow2d_weight* w, const double sub[4],
                                   const double point[2], const ow2d_quad_config* cfg,
                                   double* residual, int* converged, long long* evaluations);

/* Grid + golden-section estimate of sup |d2 f / dt ds| over sub. */
ow2d_status ow2d_sup_norm(const ow2d_expr* f, const double sub[4], int grid_n, double* value,
                          int* method, long long* evaluations);

/* Printed closed-form constant next to the one recomputed from moments.
 * sub is used by OW2D_CONST_W1_SUBRECT and must lie inside rect. */
ow2d_status ow2d_closed_form_constant(int constant_case, const double rect[4],
                                      const double sub[4], ow2d_constant_pair* out);

/* ---- cubature --------------------------------------------------------- */

/* Adaptive cubature of iint w(t) w(s) f(t,s) dt ds over rect with a
 * certified error bound. */
ow2d_status ow2d_cubature(const ow2d_expr* f, const ow2d_weight* w, const double rect[4],
                          double target_error, long long max_cells,
                          const ow2d_quad_config* cfg, ow2d_cubature_result* out);

#ifdef __cplusplus
}
#endif

#endif /* OSTROWSKI2D_H */
