/*
 * C interface to the stlcp predictive runtime verification library.
 *
 * Objects are opaque handles created by `stlcp_*_create/parse/load/...`
 * functions and released with the matching `stlcp_*_free`. Every function
 * that can fail returns an `stlcp_status`; on failure the message for the
 * calling thread is available from `stlcp_last_error()` until the next call.
 * Strings returned through `char**` are owned by the caller and released
 * with `stlcp_string_free`.
 */
#ifndef STLCP_STLCP_H
#define STLCP_STLCP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(STLCP_BUILDING_LIBRARY)
#    define STLCP_API __declspec(dllexport)
#  else
#    define STLCP_API __declspec(dllimport)
#  endif
#else
#  define STLCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stlcp_status {
  STLCP_OK = 0,
  STLCP_ERR_INVALID_ARGUMENT = 1,
  STLCP_ERR_PARSE = 2,
  STLCP_ERR_UNBOUNDED = 3,
  STLCP_ERR_SIGNAL_TOO_SHORT = 4,
  STLCP_ERR_DIMENSION = 5,
  STLCP_ERR_NOT_PNF = 6,
  STLCP_ERR_NORM_MISMATCH = 7,
  STLCP_ERR_HORIZON = 8,
  STLCP_ERR_MISSING_ID = 9,
  STLCP_ERR_IO = 10,
  STLCP_ERR_FORMAT = 11,
  STLCP_ERR_CALIBRATION_MISMATCH = 12,
  STLCP_ERR_INTERNAL = 13
} stlcp_status;

typedef enum stlcp_method { STLCP_METHOD_DIRECT = 0, STLCP_METHOD_INDIRECT = 1 } stlcp_method;
typedef enum stlcp_norm { STLCP_NORM_L2 = 0, STLCP_NORM_LINF = 1 } stlcp_norm;

typedef struct stlcp_formula stlcp_formula;
typedef struct stlcp_dataset stlcp_dataset;
typedef struct stlcp_predictor stlcp_predictor;
typedef struct stlcp_calibration stlcp_calibration;
typedef struct stlcp_verdict stlcp_verdict;
typedef struct stlcp_report stlcp_report;

STLCP_API const char* stlcp_version(void);
STLCP_API const char* stlcp_last_error(void);
/* Byte offset of the last parse error, or -1. */
STLCP_API int64_t stlcp_last_error_position(void);
STLCP_API const char* stlcp_status_name(stlcp_status status);
STLCP_API void stlcp_string_free(char* s);

/* ---- formulas ---- */
STLCP_API stlcp_status stlcp_formula_parse(const char* text, stlcp_formula** out);
/* Also accepts the rewritten-only forms False, R[a,b], T[a,b]. */
STLCP_API stlcp_status stlcp_formula_parse_internal(const char* text, stlcp_formula** out);
STLCP_API void stlcp_formula_free(stlcp_formula* f);
STLCP_API stlcp_status stlcp_formula_render(const stlcp_formula* f, char** out);
STLCP_API stlcp_status stlcp_formula_hash(const stlcp_formula* f, char** out);
STLCP_API stlcp_status stlcp_formula_length(const stlcp_formula* f, int64_t* out);
STLCP_API stlcp_status stlcp_formula_is_bounded(const stlcp_formula* f, int* out);
STLCP_API stlcp_status stlcp_formula_is_pnf(const stlcp_formula* f, int* out);
STLCP_API stlcp_status stlcp_formula_node_count(const stlcp_formula* f, size_t* out);
STLCP_API stlcp_status stlcp_formula_to_pnf(const stlcp_formula* f, stlcp_formula** out);
STLCP_API stlcp_status stlcp_formula_truncate(const stlcp_formula* f, int64_t bound,
                                              stlcp_formula** out);
/* Indented tree dump of the syntax tree. */
STLCP_API stlcp_status stlcp_formula_tree(const stlcp_formula* f, char** out);
/* H = tau0 + L - t. */
STLCP_API stlcp_status stlcp_horizon(int64_t tau0, int64_t t, int64_t length, int64_t* out);

/* ---- datasets ---- */
STLCP_API stlcp_status stlcp_dataset_load(const char* path, stlcp_dataset** out);
STLCP_API stlcp_status stlcp_dataset_save(const stlcp_dataset* d, const char* path);
/* `values` holds `length * dim` row-major doubles; component names may be
 * NULL (x1..xn). Creates a dataset holding one trajectory. */
STLCP_API stlcp_status stlcp_dataset_from_array(const char* id, const double* values,
                                                size_t length, size_t dim,
                                                const char* const* names, stlcp_dataset** out);
STLCP_API stlcp_status stlcp_dataset_generate(const char* system, size_t count, uint64_t seed,
                                              stlcp_dataset** out);
/* Consecutive blocks of the given sizes. */
STLCP_API stlcp_status stlcp_dataset_split(const stlcp_dataset* d, size_t n_train, size_t n_val,
                                           size_t n_test, stlcp_dataset** train,
                                           stlcp_dataset** val, stlcp_dataset** test);
STLCP_API void stlcp_dataset_free(stlcp_dataset* d);
STLCP_API stlcp_status stlcp_dataset_size(const stlcp_dataset* d, size_t* out);
STLCP_API stlcp_status stlcp_dataset_dim(const stlcp_dataset* d, size_t* out);
STLCP_API stlcp_status stlcp_dataset_length(const stlcp_dataset* d, size_t index, size_t* out);
/* Index of the trajectory with this id. */
STLCP_API stlcp_status stlcp_dataset_find(const stlcp_dataset* d, const char* id, size_t* out);
STLCP_API stlcp_status stlcp_dataset_id(const stlcp_dataset* d, size_t index, char** out);

/* ---- semantics ---- */
STLCP_API stlcp_status stlcp_eval_robust(const stlcp_formula* f, const stlcp_dataset* d,
                                         size_t index, int64_t tau, double* out);
STLCP_API stlcp_status stlcp_eval_bool(const stlcp_formula* f, const stlcp_dataset* d,
                                       size_t index, int64_t tau, int* out);

/* ---- conformal ---- */
/* p = ceil((k+1)(1-delta)); C = p-th smallest score or +inf when p > k. */
STLCP_API stlcp_status stlcp_quantile_region(const double* scores, size_t k, double delta,
                                             double* region, size_t* rank);

/* ---- predictors ---- */
STLCP_API stlcp_status stlcp_predictor_hold_last(stlcp_predictor** out);
/* Least-squares AR model for current time t and horizon H. */
STLCP_API stlcp_status stlcp_predictor_fit_ar(const stlcp_dataset* train, size_t order,
                                              int64_t t, int64_t horizon,
                                              stlcp_predictor** out);
STLCP_API stlcp_status stlcp_predictor_load_external(const char* path, stlcp_predictor** out);
STLCP_API stlcp_status stlcp_predictor_load(const char* path, stlcp_predictor** out);
STLCP_API stlcp_status stlcp_predictor_save(const stlcp_predictor* p, const char* path);
STLCP_API void stlcp_predictor_free(stlcp_predictor* p);
/* H state vectors, row-major, written to `out` (capacity `horizon * dim`). */
STLCP_API stlcp_status stlcp_predict(const stlcp_predictor* p, const stlcp_dataset* d,
                                     size_t index, int64_t t, int64_t horizon, double* out);

/* ---- calibration and verdicts ---- */
STLCP_API stlcp_status stlcp_calibrate_direct(const stlcp_predictor* p, const stlcp_dataset* val,
                                              const stlcp_formula* f, int64_t tau0, int64_t t,
                                              double delta, stlcp_calibration** out);
STLCP_API stlcp_status stlcp_calibrate_indirect(const stlcp_predictor* p,
                                                const stlcp_dataset* val, int64_t t,
                                                int64_t horizon, double delta, stlcp_norm norm,
                                                stlcp_calibration** out);
STLCP_API stlcp_status stlcp_calibration_load(const char* path, stlcp_calibration** out);
STLCP_API stlcp_status stlcp_calibration_save(const stlcp_calibration* c, const char* path);
STLCP_API stlcp_status stlcp_calibration_text(const stlcp_calibration* c, char** out);
STLCP_API void stlcp_calibration_free(stlcp_calibration* c);
STLCP_API stlcp_status stlcp_calibration_method(const stlcp_calibration* c, stlcp_method* out);
STLCP_API stlcp_status stlcp_calibration_rank(const stlcp_calibration* c, size_t* out);
STLCP_API stlcp_status stlcp_calibration_count(const stlcp_calibration* c, size_t* out);
STLCP_API stlcp_status stlcp_calibration_region_count(const stlcp_calibration* c, size_t* out);
STLCP_API stlcp_status stlcp_calibration_region(const stlcp_calibration* c, size_t index,
                                                double* out);

/* Direct or indirect, as recorded in the calibration. Indirect verification
 * rewrites the formula to positive normal form first. */
STLCP_API stlcp_status stlcp_verify(const stlcp_predictor* p, const stlcp_formula* f,
                                    const stlcp_calibration* c, const stlcp_dataset* observed,
                                    size_t index, int64_t tau0, int64_t t, stlcp_verdict** out);
/* Smallest certifying delta over an ascending grid; *out is NULL if none. */
STLCP_API stlcp_status stlcp_min_delta(stlcp_method method, const stlcp_predictor* p,
                                       const stlcp_dataset* val, const stlcp_formula* f,
                                       const stlcp_dataset* observed, size_t index, int64_t tau0,
                                       int64_t t, const double* grid, size_t grid_size,
                                       stlcp_norm norm, stlcp_verdict** out);
STLCP_API void stlcp_verdict_free(stlcp_verdict* v);
STLCP_API stlcp_status stlcp_verdict_guaranteed(const stlcp_verdict* v, int* out);
STLCP_API stlcp_status stlcp_verdict_robustness(const stlcp_verdict* v, double* out);
STLCP_API stlcp_status stlcp_verdict_delta(const stlcp_verdict* v, double* out);
/* Single-line record; `config_hash` may be NULL. */
STLCP_API stlcp_status stlcp_verdict_record(const stlcp_verdict* v, const char* config_hash,
                                            char** out);
/* Per-predicate worst-case diagnostics (indirect), one `label<TAB>min` per line. */
STLCP_API stlcp_status stlcp_verdict_diagnostics(const stlcp_verdict* v, char** out);

/* ---- evaluation harness ---- */
typedef struct stlcp_eval_options {
  stlcp_method method;
  const char* system;    /* drift-sine | switching-noise | falling-recovery */
  int64_t length;        /* trajectory length, 0 = system default */
  double noise_scale;    /* < 0 = system default */
  int64_t tau0;
  int64_t t;
  double delta;
  size_t n_train, n_val, n_test;
  uint64_t seed;
  int use_ar;            /* 1 = AR predictor, 0 = hold-last */
  size_t ar_order;
  stlcp_norm norm;
  size_t histogram_bins;
} stlcp_eval_options;

STLCP_API void stlcp_eval_options_default(stlcp_eval_options* options);
STLCP_API stlcp_status stlcp_evaluate(const stlcp_formula* f, const stlcp_eval_options* options,
                                      stlcp_report** out);
STLCP_API void stlcp_report_free(stlcp_report* r);
STLCP_API stlcp_status stlcp_report_summary(const stlcp_report* r, char** out);
STLCP_API stlcp_status stlcp_report_outcomes_csv(const stlcp_report* r, char** out);
STLCP_API stlcp_status stlcp_report_histogram_csv(const stlcp_report* r, char** out);
STLCP_API stlcp_status stlcp_report_calibration(const stlcp_report* r, stlcp_calibration** out);
/* counts[4]: guaranteed&satisfied, guaranteed&violated, not-guaranteed&satisfied,
 * not-guaranteed&violated; covered: region inequality held. */
STLCP_API stlcp_status stlcp_report_counts(const stlcp_report* r, size_t counts[4],
                                           size_t* covered);

/* FNV-1a 64 of arbitrary text as 16 hex digits. */
STLCP_API stlcp_status stlcp_text_hash(const char* text, char** out);

#ifdef __cplusplus
}
#endif

#endif /* STLCP_STLCP_H */
