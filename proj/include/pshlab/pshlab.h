/* pshlab — numerical laboratory for singularities and oscillation of
 * plurisubharmonic functions.
 *
 * C API over the shared library: opaque handles, integer status codes,
 * thread-local error messages. Strings returned as char* are heap-allocated
 * and must be released with pshlab_string_free.
 */
#ifndef PSHLAB_H
#define PSHLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pshlab_status {
    PSHLAB_OK = 0,
    PSHLAB_ERR_PARSE = 1,
    PSHLAB_ERR_DIMENSION = 2,
    PSHLAB_ERR_DOMAIN = 3,     /* mathematical precondition violated */
    PSHLAB_ERR_SINGULAR = 4,   /* evaluation/gradient on the singular set */
    PSHLAB_ERR_ESTIMATION = 5, /* estimator could not produce an answer */
    PSHLAB_ERR_IO = 6,
    PSHLAB_ERR_INVALID = 7, /* null handle / bad argument */
    PSHLAB_ERR_INTERNAL = 8
} pshlab_status;

typedef struct pshlab_expr pshlab_expr;
typedef struct pshlab_domain pshlab_domain;
typedef struct pshlab_report pshlab_report;

const char* pshlab_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* pshlab_last_error(void);

void pshlab_string_free(char* s);

/* Worker count for internal Monte Carlo loops; results are bitwise identical
 * for any value. Also settable via the PSHLAB_THREADS environment variable. */
void pshlab_set_threads(int n);

/* --- expressions -------------------------------------------------------- */

pshlab_status pshlab_expr_parse(const char* text, pshlab_expr** out);
void pshlab_expr_free(pshlab_expr* e);
int pshlab_expr_dim(const pshlab_expr* e); /* complex dimension, or -1 */

/* Canonical grammar text; round-trips through pshlab_expr_parse exactly. */
pshlab_status pshlab_expr_print(const pshlab_expr* e, char** out);

/* coords = (Re z1, Im z1, ...), n_coords = 2*dim. minus_inf is set to 1 when
 * the value is -infinity (value is then meaningless). */
pshlab_status pshlab_expr_eval(const pshlab_expr* e, const double* coords, size_t n_coords,
                               double* value, int* minus_inf);

/* Real gradient in R^{2n}; grad must hold n_coords doubles. */
pshlab_status pshlab_expr_grad(const pshlab_expr* e, const double* coords, size_t n_coords,
                               double* grad);

/* --- domains ------------------------------------------------------------ */

pshlab_status pshlab_domain_parse(const char* text, pshlab_domain** out);
void pshlab_domain_free(pshlab_domain* d);
int pshlab_domain_dim(const pshlab_domain* d);
pshlab_status pshlab_domain_contains(const pshlab_domain* d, const double* coords,
                                     size_t n_coords, int* inside);
pshlab_status pshlab_domain_dist_to_boundary(const pshlab_domain* d, const double* coords,
                                             size_t n_coords, double* dist);

/* --- scenarios ---------------------------------------------------------- */

/* Runs a scenario from config text (see README for the grammar). out_dir may
 * be NULL or empty: no files are written then. On success *out owns the
 * report. A report whose checks fail still returns PSHLAB_OK; inspect
 * pshlab_report_passed. */
pshlab_status pshlab_run_config(const char* config_text, const char* out_dir,
                                pshlab_report** out);

pshlab_status pshlab_reproduce(const char* case_id, const char* out_dir, pshlab_report** out);

int pshlab_report_passed(const pshlab_report* r); /* 1 pass, 0 fail, -1 bad handle */
pshlab_status pshlab_report_json(const pshlab_report* r, char** out);
void pshlab_report_free(pshlab_report* r);

/* Re-render a plot (slope / vmo / jn) from a report.json file. */
pshlab_status pshlab_plot(const char* report_json_path, const char* artifact,
                          const char* out_svg_path);

/* One line per catalog entry. */
pshlab_status pshlab_catalog_text(char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PSHLAB_H */
