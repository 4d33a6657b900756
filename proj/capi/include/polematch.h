/* C interface to the pole-matching parametric ROM library.
 *
 * All objects are opaque handles created and destroyed by the library; every
 * fallible call returns a pm_status and leaves a human-readable message in
 * pm_last_error() (thread-local). Output handles are written only on PM_OK.
 */
#ifndef POLEMATCH_H
#define POLEMATCH_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pm_status {
    PM_OK = 0,
    PM_ERR_INVALID_ARGUMENT = 1,
    PM_ERR_NONSIMPLE_EIGENVALUE = 2,
    PM_ERR_DEFECTIVE_MATRIX = 3,
    PM_ERR_POLE_EVALUATION = 4,
    PM_ERR_SINGULAR_SYSTEM = 5,
    PM_ERR_SHAPE_MISMATCH = 6,
    PM_ERR_SIZE_MISMATCH = 7,
    PM_ERR_TOO_LARGE = 8,
    PM_ERR_TOO_MANY_POLES = 9,
    PM_ERR_ZERO_NORM = 10,
    PM_ERR_EMPTY_REPOSITORY = 11,
    PM_ERR_OUT_OF_DOMAIN = 12,
    PM_ERR_UNDERDETERMINED = 13,
    PM_ERR_ILL_CONDITIONED = 14,
    PM_ERR_REFINE_DEPTH_EXCEEDED = 15,
    PM_ERR_ORACLE_FAILURE = 16,
    PM_ERR_GUARD_VIOLATION = 17,
    PM_ERR_IO = 18,
    PM_ERR_PARSE = 19,
    PM_ERR_INTERNAL = 99
} pm_status;

typedef struct pm_statespace pm_statespace;
typedef struct pm_rom pm_rom;
typedef struct pm_repository pm_repository;
typedef struct pm_regressed pm_regressed;

const char* pm_last_error(void);
const char* pm_status_name(pm_status status);
const char* pm_version(void);

/* ---- state-space ROMs ------------------------------------------------ */

/* A is k*k row-major, B and C are length k. */
pm_status pm_statespace_create(const double* A, const double* B, const double* C, int k,
                               pm_statespace** out);
pm_status pm_statespace_load(const char* path, pm_statespace** out);
pm_status pm_statespace_save(const pm_statespace* ss, const char* path);
pm_status pm_statespace_transfer(const pm_statespace* ss, double s_re, double s_im, double* h_re,
                                 double* h_im);
pm_status pm_statespace_to_rom(const pm_statespace* ss, double param, pm_rom** out);
void pm_statespace_free(pm_statespace* ss);

/* ---- pole-residue ROMs ------------------------------------------------ */

/* D is n_d*4 row-major rows (a, b, c1, c2), S is n_s*2 rows (lambda, c). */
pm_status pm_rom_create(double param, const double* D, int n_d, const double* S, int n_s,
                        pm_rom** out);
pm_status pm_rom_load(const char* path, pm_rom** out);  /* accepts either JSON schema */
pm_status pm_rom_save(const pm_rom* rom, const char* path);
int pm_rom_nd(const pm_rom* rom);
int pm_rom_ns(const pm_rom* rom);
double pm_rom_param(const pm_rom* rom);
/* Copies the row-major blocks; pass NULL to skip either. */
pm_status pm_rom_data(const pm_rom* rom, double* D, double* S);
pm_status pm_rom_transfer(const pm_rom* rom, double s_re, double s_im, double* h_re, double* h_im);
double pm_rom_stability_margin(const pm_rom* rom);
void pm_rom_free(pm_rom* rom);

/* ---- pole matching ----------------------------------------------------- */

typedef struct pm_match_stats {
    double objective;
    double objective_d;
    double objective_s;
    long evaluations;
    int low_confidence;
} pm_match_stats;

/* v_d must hold nd(target) ints, v_s ns(target); either may be NULL. The
 * budget is the per-block evaluation cap (0 picks 50 n^2). */
pm_status pm_match(const pm_rom* target, const pm_rom* source, double w_p, double w_r, long budget,
                   pm_rom** matched, int* v_d, int* v_s, pm_match_stats* stats);
pm_status pm_distance(const pm_rom* a, const pm_rom* b, double w_p, double w_r, double* dist,
                      double* rel_err);

/* ---- repositories ------------------------------------------------------ */

typedef struct pm_build_config {
    int model_kind;            /* 0 builtin benchmark, 1 manifest directory */
    const char* manifest_path; /* model_kind 1 */
    double p_lower, p_upper;
    double u0;
    double tau_e;
    int q;
    int predictor_order;
    int max_refine_depth;
    double w_p, w_r;
    int scheme;  /* 0 linear, 1 cubic spline */
    int refine;  /* 0 skips the certification phase */
    long match_budget;
    int n_complex_pairs; /* builtin model */
    int n_real;          /* builtin model; < 0 auto-calibrates */
    int frf_points;
} pm_build_config;

void pm_build_config_defaults(pm_build_config* cfg);

typedef void (*pm_log_fn)(const char* line, void* user);

pm_status pm_repository_build(const pm_build_config* cfg, pm_log_fn log, void* user,
                              pm_repository** out);
pm_status pm_repository_load(const char* path, pm_repository** out);
/* config_json may be NULL or a serialized JSON object echoed into the file. */
pm_status pm_repository_save(const pm_repository* repo, const char* config_json,
                             const char* path);
int pm_repository_size(const pm_repository* repo);
int pm_repository_high_fidelity(const pm_repository* repo);
pm_status pm_repository_set_high_fidelity(pm_repository* repo, int i_h);
double pm_repository_param(const pm_repository* repo, int index);
pm_status pm_repository_rom(const pm_repository* repo, int index, pm_rom** out);
pm_status pm_repository_interpolate(const pm_repository* repo, double p, int scheme, pm_rom** out);
pm_status pm_repository_interpolate_guarded(const pm_repository* repo, double p, int scheme,
                                            int* used_fallback, pm_rom** out);
pm_status pm_repository_predict(const pm_repository* repo, double p, int order, pm_rom** out);
void pm_repository_free(pm_repository* repo);

/* ---- regression -------------------------------------------------------- */

pm_status pm_regress(const pm_repository* repo, int q, pm_regressed** out, double* max_residual);
pm_status pm_regressed_load(const char* path, pm_regressed** out);
pm_status pm_regressed_save(const pm_regressed* rp, const char* path);
int pm_regressed_q(const pm_regressed* rp);
pm_status pm_regressed_domain(const pm_regressed* rp, double* p_lower, double* p_upper);
long pm_regressed_coefficient_count(const pm_regressed* rp);
pm_status pm_regressed_eval(const pm_regressed* rp, double p, pm_rom** out);
pm_status pm_regression_disagreement(const pm_repository* repo, const pm_regressed* rp,
                                     int grid_points, double w_p, double w_r, int scheme,
                                     double* max_e);
void pm_regressed_free(pm_regressed* rp);

/* ---- builtin benchmark ------------------------------------------------- */

pm_status pm_fom_transfer(double p, double s_re, double s_im, double* h_re, double* h_im);
pm_status pm_fom_oracle(double p, int n_complex_pairs, int n_real, pm_rom** out);
pm_status pm_fom_default_n_real(double tau_e, int grid_points, int* n_real);
pm_status pm_frf_error_fom(const pm_rom* rom, double p, int grid_points, double* error);
/* Tabulated reference response on an explicit frequency grid. */
pm_status pm_frf_error_table(const pm_rom* rom, const double* omega, const double* h_re,
                             const double* h_im, int n, double* error);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POLEMATCH_H */
