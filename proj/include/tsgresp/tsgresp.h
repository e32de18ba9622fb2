/*
 * tsgresp C API
 *
 * Every fallible call returns a tsg_status. On failure, tsg_last_error()
 * returns a message for the calling thread, valid until that thread's next
 * failing call. Objects are opaque handles released with the matching
 * tsg_*_free function; passing NULL to a free function is a no-op.
 *
 * Array outputs are written into caller buffers. The `len` argument is the
 * buffer length in elements and must equal the documented size exactly.
 * Series, layer and node indices are 0-based.
 */
#ifndef TSGRESP_H
#define TSGRESP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TSG_BUILDING_LIBRARY)
#    define TSG_API __declspec(dllexport)
#  else
#    define TSG_API __declspec(dllimport)
#  endif
#else
#  define TSG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsg_status {
    TSG_OK = 0,
    TSG_ERR_INVALID_ARGUMENT = 1,
    TSG_ERR_IO = 2,
    TSG_ERR_FORMAT = 3,
    TSG_ERR_SHAPE = 4,
    TSG_ERR_DEGENERATE = 5,
    TSG_ERR_NUMERICAL = 6,
    TSG_ERR_INTERNAL = 99
} tsg_status;

typedef enum tsg_collection_kind {
    TSG_KIND_PROB = 0,     /* edge probabilities in [0, 1] */
    TSG_KIND_ADJ = 1,      /* 0/1 adjacency, zero diagonal */
    TSG_KIND_WEIGHTED = 2  /* signed real weights */
} tsg_collection_kind;

typedef struct tsg_collection tsg_collection;
typedef struct tsg_embedding tsg_embedding;
typedef struct tsg_dissim tsg_dissim;
typedef struct tsg_instance tsg_instance;
typedef struct tsg_curve tsg_curve;
typedef struct tsg_svtable tsg_svtable;

TSG_API const char* tsg_version(void);
TSG_API const char* tsg_last_error(void);
TSG_API const char* tsg_status_name(tsg_status status);
/* Releases strings returned through char** out-parameters. */
TSG_API void tsg_string_free(char* s);

/* ---- collections ------------------------------------------------------- */

/* values: N*M*n*n doubles, member (k, l) row-major, series-major then layer-major. */
TSG_API tsg_status tsg_collection_create(tsg_collection_kind kind, size_t N, size_t M, size_t n,
                                         const double* values, tsg_collection** out);
TSG_API tsg_status tsg_collection_load(const char* dir, tsg_collection** out);
TSG_API tsg_status tsg_collection_save(const tsg_collection* c, const char* dir);
TSG_API tsg_status tsg_collection_info(const tsg_collection* c, tsg_collection_kind* kind,
                                       size_t* N, size_t* M, size_t* n);
TSG_API tsg_status tsg_collection_copy_values(const tsg_collection* c, double* out, size_t len);
TSG_API tsg_status tsg_collection_export_layer_csv(const tsg_collection* c, size_t k, size_t l,
                                                   const char* path);
TSG_API void tsg_collection_free(tsg_collection* c);

TSG_API tsg_status tsg_sample_adjacency(const tsg_collection* probs, uint64_t seed,
                                        tsg_collection** out);
TSG_API tsg_status tsg_binarize_weighted(const tsg_collection* weighted, double percentile,
                                         tsg_collection** out);

/* ---- spectral embedding ----------------------------------------------- */

TSG_API tsg_status tsg_duase(const tsg_collection* c, size_t d, tsg_embedding** out);
TSG_API tsg_status tsg_embedding_load(const char* dir, tsg_embedding** out);
TSG_API tsg_status tsg_embedding_save(const tsg_embedding* e, const char* dir);
TSG_API tsg_status tsg_embedding_info(const tsg_embedding* e, size_t* N, size_t* n, size_t* d);
/* len == d */
TSG_API tsg_status tsg_embedding_singular_values(const tsg_embedding* e, double* out, size_t len);
/* Left embedding of series k, row-major; len == n*d. */
TSG_API tsg_status tsg_embedding_left(const tsg_embedding* e, size_t k, double* out, size_t len);
/* CSV rows "series,node,x1,...,xd" with a header line. */
TSG_API tsg_status tsg_embedding_write_csv(const tsg_embedding* e, const char* path);
TSG_API void tsg_embedding_free(tsg_embedding* e);

/* ---- dissimilarities -------------------------------------------------- */

TSG_API tsg_status tsg_dissim_from_embedding(const tsg_embedding* e, tsg_dissim** out);
/* values: N*N row-major; must be symmetric, zero-diagonal, nonnegative. */
TSG_API tsg_status tsg_dissim_create(size_t N, const double* values, tsg_dissim** out);
TSG_API tsg_status tsg_dissim_load_csv(const char* path, tsg_dissim** out);
TSG_API tsg_status tsg_dissim_save_csv(const tsg_dissim* delta, const char* path);
TSG_API tsg_status tsg_dissim_size(const tsg_dissim* delta, size_t* N);
TSG_API tsg_status tsg_dissim_values(const tsg_dissim* delta, double* out, size_t len);
TSG_API void tsg_dissim_free(tsg_dissim* delta);

/* ---- raw-stress embedding --------------------------------------------- */

typedef struct tsg_stress_config {
    uint64_t max_iters;  /* >= 1 */
    double rel_tol;      /* > 0 */
    uint64_t restarts;   /* random starts besides the classical-MDS start */
    uint64_t seed;
} tsg_stress_config;

typedef struct tsg_stress_summary {
    double stress;
    uint64_t iterations;
    int converged;
    uint64_t restart_index;
} tsg_stress_summary;

TSG_API tsg_stress_config tsg_stress_config_default(void);
TSG_API tsg_status tsg_raw_stress(const tsg_dissim* delta, const double* z, size_t len,
                                  double* out);
/* config may be NULL for defaults; z_out has len == N; summary may be NULL. */
TSG_API tsg_status tsg_smacof(const tsg_dissim* delta, const tsg_stress_config* config,
                              double* z_out, size_t len, tsg_stress_summary* summary);

/* ---- regression ------------------------------------------------------- */

typedef struct tsg_ftest {
    double statistic; /* +inf on a perfect fit */
    double critical_value;
    double p_value;
    uint64_t df1;
    uint64_t df2;
    int reject;
    int perfect_fit;
} tsg_ftest;

TSG_API tsg_status tsg_ols_fit(const double* y, const double* z, size_t s, double* intercept,
                               double* slope);
TSG_API tsg_status tsg_f_test(const double* y, const double* y_hat, size_t s, double alpha,
                              tsg_ftest* out);
TSG_API tsg_status tsg_f_cdf(double x, double d1, double d2, double* out);
TSG_API tsg_status tsg_f_quantile(double p, double d1, double d2, double* out);

/* ---- prediction pipeline ---------------------------------------------- */

/* request_json: {"d": 2, "labeled": [{"series": 0, "response": 1.5}, ...],
 *                "targets": [5], "alpha": 0.05, "stress": {...}}
 * *report_json receives a JSON document; release it with tsg_string_free. */
TSG_API tsg_status tsg_predict_json(const tsg_collection* c, const char* request_json,
                                    char** report_json);

/* ---- simulation ------------------------------------------------------- */

typedef struct tsg_generator_params {
    uint64_t labeled;  /* s */
    double alpha;
    double beta;
    double noise_sd;
    uint64_t dim;
    double right_lo;
    double right_hi;
    uint64_t base_seed;
} tsg_generator_params;

TSG_API tsg_generator_params tsg_generator_params_default(void);
TSG_API tsg_status tsg_schedule_shape(uint64_t K, size_t* n, size_t* N, size_t* M);
TSG_API tsg_status tsg_instance_generate(uint64_t K, const tsg_generator_params* params,
                                         uint64_t replicate, tsg_instance** out);
TSG_API tsg_status tsg_instance_info(const tsg_instance* inst, size_t* N, size_t* labeled,
                                     size_t* clamped);
TSG_API tsg_status tsg_instance_probabilities(const tsg_instance* inst, tsg_collection** out);
/* Bernoulli sample using the instance's own sampling seed. */
TSG_API tsg_status tsg_instance_adjacency(const tsg_instance* inst, tsg_collection** out);
/* len == N */
TSG_API tsg_status tsg_instance_scalars(const tsg_instance* inst, double* out, size_t len);
/* len == labeled */
TSG_API tsg_status tsg_instance_responses(const tsg_instance* inst, double* out, size_t len);
TSG_API void tsg_instance_free(tsg_instance* inst);

/* ---- experiments ------------------------------------------------------ */

typedef enum tsg_experiment_kind {
    TSG_EXPERIMENT_PREDICTION = 1, /* mean squared prediction gap per K */
    TSG_EXPERIMENT_POWER = 2       /* |power(F-hat) - power(F*)| per K */
} tsg_experiment_kind;

typedef struct tsg_experiment_options {
    tsg_generator_params params;
    uint64_t kmin;
    uint64_t kmax;
    uint64_t reps;
    double alpha_tilde;
    uint64_t threads;
    tsg_stress_config stress;
    int population_variant;
} tsg_experiment_options;

TSG_API tsg_experiment_options tsg_experiment_options_default(void);
TSG_API tsg_status tsg_experiment_run(tsg_experiment_kind kind,
                                      const tsg_experiment_options* options, tsg_curve** out);
TSG_API tsg_status tsg_curve_size(const tsg_curve* curve, size_t* points);
TSG_API tsg_status tsg_curve_point(const tsg_curve* curve, size_t i, uint64_t* K,
                                   double* summary, size_t* failed);
/* Any path may be NULL to skip that output. */
TSG_API tsg_status tsg_curve_write(const tsg_curve* curve, const char* replicates_csv,
                                   const char* summary_csv, const char* svg_path,
                                   const char* title);
TSG_API void tsg_curve_free(tsg_curve* curve);

TSG_API tsg_status tsg_svtable_run(const tsg_generator_params* params, uint64_t kmin,
                                   uint64_t kmax, tsg_svtable** out);
TSG_API tsg_status tsg_svtable_size(const tsg_svtable* table, size_t* rows);
TSG_API tsg_status tsg_svtable_row(const tsg_svtable* table, size_t i, uint64_t* K,
                                   double* sigma1, double* sigma2);
TSG_API tsg_status tsg_svtable_write(const tsg_svtable* table, const char* csv_path,
                                     const char* svg_path);
TSG_API void tsg_svtable_free(tsg_svtable* table);

#ifdef __cplusplus
}
#endif

#endif /* TSGRESP_H */
