/*
 * nnpost C API.
 *
 * Posterior moments of the Bayesian linear regression
 *
 *   sigma1 ~ lognormal, sigma2 ~ half-normal(0, 1),
 *   beta ~ normal(0, sigma1), y ~ normal(X beta, sigma2)
 *
 * computed by integrating beta out in the right singular basis of X and
 * treating the remaining (sigma1, sigma2) density by trapezoid quadrature or
 * random-walk Metropolis.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function (NULL is accepted). Every fallible call returns an
 * nnpost_status; on failure a human-readable message for the calling thread
 * is available from nnpost_last_error(). Handles are immutable once created
 * and may be shared between threads.
 *
 * Matrices cross the boundary as row-major double arrays.
 */
#ifndef NNPOST_H
#define NNPOST_H

#include <stddef.h>
#include <stdint.h>

#if defined(NNPOST_BUILDING_LIBRARY)
#define NNPOST_API __attribute__((visibility("default")))
#else
#define NNPOST_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define NNPOST_ABI_VERSION 1

typedef enum nnpost_status {
  NNPOST_OK = 0,
  NNPOST_ERR_INVALID_ARGUMENT = 1,
  NNPOST_ERR_DIMENSION = 2,
  NNPOST_ERR_NON_FINITE = 3,
  NNPOST_ERR_EMPTY = 4,
  NNPOST_ERR_SVD = 5,
  NNPOST_ERR_MODE_SEARCH = 6,
  NNPOST_ERR_DEGENERATE_GRID = 7,
  NNPOST_ERR_NUMERICAL = 8,
  NNPOST_ERR_SAMPLER = 9,
  NNPOST_ERR_ALLOC = 10,
  NNPOST_ERR_INTERNAL = 11
} nnpost_status;

typedef enum nnpost_cov_mode {
  NNPOST_COV_EXACT = 0, /* law of total covariance */
  NNPOST_COV_PAPER = 1, /* V diag(E[var z | sigma]) V^t */
  NNPOST_COV_DIAG = 2   /* exact var(z_i), cross terms of E[z | sigma] dropped */
} nnpost_cov_mode;

typedef struct nnpost_data nnpost_data;
typedef struct nnpost_basis nnpost_basis;
typedef struct nnpost_summary nnpost_summary;
typedef struct nnpost_chain nnpost_chain;

typedef struct nnpost_fit_options {
  double gamma;          /* prior strength on log sigma1, > 0 (default 8) */
  int nodes;             /* trapezoid nodes per axis, >= 2 (default 200) */
  double tail_drop;      /* boundary log-density deficit (default 46) */
  double sigma_floor;    /* lower clamp for both sigma ranges (default 1e-8) */
  nnpost_cov_mode cov_mode;
  unsigned threads;      /* 0 = hardware concurrency (default 1) */
  int use_grid;          /* nonzero: integrate over grid[] instead of auto bounds */
  double grid[4];        /* sigma1 lo, sigma1 hi, sigma2 lo, sigma2 hi */
} nnpost_fit_options;

typedef struct nnpost_sampler_options {
  double gamma;          /* default 8 */
  size_t draws;          /* default 10000 */
  size_t warmup;         /* default 1000 */
  double step_scale;     /* initial proposal sd on the log scale (default 0.3) */
  uint64_t seed;         /* default 0 */
  int adapt;             /* default 1 */
  int draw_beta;         /* nonzero: also draw beta for every sample (default 1) */
  uint64_t beta_seed;    /* default 1 */
} nnpost_sampler_options;

NNPOST_API int nnpost_abi_version(void);
NNPOST_API const char* nnpost_status_string(nnpost_status status);
/* Message for the most recent failure on the calling thread ("" if none). */
NNPOST_API const char* nnpost_last_error(void);

/* ---- data ---------------------------------------------------------------- */

/* Copies x (n x k, row-major) and y (n) after validating shape/finiteness. */
NNPOST_API nnpost_status nnpost_data_create(size_t n, size_t k, const double* x, const double* y,
                                            nnpost_data** out);
/* Synthetic X, beta_true and y = X beta_true + eps, all iid N(0, 1).
 * beta_true (length k) may be NULL. Deterministic for a given seed. */
NNPOST_API nnpost_status nnpost_data_generate(size_t n, size_t k, uint64_t seed,
                                              nnpost_data** out, double* beta_true);
NNPOST_API void nnpost_data_free(nnpost_data* data);
NNPOST_API nnpost_status nnpost_data_dims(const nnpost_data* data, size_t* n, size_t* k);
NNPOST_API nnpost_status nnpost_data_copy_x(const nnpost_data* data, double* x);
NNPOST_API nnpost_status nnpost_data_copy_y(const nnpost_data* data, double* y);

/* ---- precompute ------------------------------------------------------------ */

/* SVD of X and the derived vector w = V^t X^t y. */
NNPOST_API nnpost_status nnpost_basis_create(const nnpost_data* data, nnpost_basis** out);
NNPOST_API void nnpost_basis_free(nnpost_basis* basis);
NNPOST_API nnpost_status nnpost_basis_dims(const nnpost_basis* basis, size_t* n, size_t* k);
NNPOST_API nnpost_status nnpost_basis_lambda(const nnpost_basis* basis, double* lambda);
NNPOST_API nnpost_status nnpost_basis_w(const nnpost_basis* basis, double* w);
NNPOST_API nnpost_status nnpost_basis_v(const nnpost_basis* basis, double* v);
NNPOST_API nnpost_status nnpost_basis_yty(const nnpost_basis* basis, double* yty);
NNPOST_API nnpost_status nnpost_log_qtilde(const nnpost_basis* basis, double gamma, double sigma1,
                                           double sigma2, double* out);

/* ---- quadrature fit ---------------------------------------------------------- */

NNPOST_API void nnpost_fit_options_init(nnpost_fit_options* options);
NNPOST_API nnpost_status nnpost_fit(const nnpost_basis* basis, const nnpost_fit_options* options,
                                    nnpost_summary** out);
NNPOST_API void nnpost_summary_free(nnpost_summary* summary);
NNPOST_API size_t nnpost_summary_k(const nnpost_summary* summary);
/* out[0..3] = E[sigma1], E[sigma2], var(sigma1), var(sigma2). */
NNPOST_API nnpost_status nnpost_summary_sigma(const nnpost_summary* summary, double out[4]);
NNPOST_API nnpost_status nnpost_summary_mean_beta(const nnpost_summary* summary, double* mean);
/* k x k, row-major. */
NNPOST_API nnpost_status nnpost_summary_cov_beta(const nnpost_summary* summary, double* cov);
/* Integration rectangle actually used: sigma1 lo/hi, sigma2 lo/hi. */
NNPOST_API nnpost_status nnpost_summary_grid(const nnpost_summary* summary, double out[4],
                                             int* nodes);

/* ---- sampler ------------------------------------------------------------------- */

NNPOST_API void nnpost_sampler_options_init(nnpost_sampler_options* options);
NNPOST_API nnpost_status nnpost_sample(const nnpost_basis* basis,
                                       const nnpost_sampler_options* options, nnpost_chain** out);
NNPOST_API void nnpost_chain_free(nnpost_chain* chain);
NNPOST_API size_t nnpost_chain_draws(const nnpost_chain* chain);
NNPOST_API size_t nnpost_chain_k(const nnpost_chain* chain);
NNPOST_API double nnpost_chain_acceptance(const nnpost_chain* chain);
NNPOST_API nnpost_status nnpost_chain_sigma(const nnpost_chain* chain, double* sigma1,
                                            double* sigma2);
/* draws x k, row-major. Fails with NNPOST_ERR_INVALID_ARGUMENT if the chain
 * was sampled without beta draws. */
NNPOST_API nnpost_status nnpost_chain_beta(const nnpost_chain* chain, double* beta);
/* Chain mean and batch-means MCSE for sigma1, sigma2 and (if drawn) each
 * beta_i, in that order; arrays of length 2 + k (2 without beta draws). */
NNPOST_API nnpost_status nnpost_chain_estimates(const nnpost_chain* chain, double* mean,
                                                double* mcse);

#ifdef __cplusplus
}
#endif

#endif /* NNPOST_H */
