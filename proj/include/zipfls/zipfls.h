// Copyright 2026 The zipfls Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the zipfls library.
 *
 * Every function returns a zls_status. On failure a human-readable message
 * is available from zls_last_error() on the calling thread until the next
 * call into the library from that thread. Objects are opaque handles that
 * must be released with their matching _free function; strings returned
 * through char** out-parameters must be released with zls_string_free().
 */

#ifndef ZIPFLS_ZIPFLS_H_
#define ZIPFLS_ZIPFLS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ZIPFLS_BUILDING_LIBRARY)
#define ZIPFLS_API __declspec(dllexport)
#else
#define ZIPFLS_API __declspec(dllimport)
#endif
#else
#define ZIPFLS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zls_status {
  ZLS_OK = 0,
  ZLS_ERR_INVALID_ARGUMENT = 1, /* bad sizes, ranges, config, method names */
  ZLS_ERR_DOMAIN = 2,           /* mathematically undefined result */
  ZLS_ERR_NUMERIC = 3,          /* non-convergence, non-finite loss */
  ZLS_ERR_IO = 4,               /* unreadable/unwritable or malformed files */
  ZLS_ERR_INTERNAL = 5
} zls_status;

ZIPFLS_API const char* zls_version(void);
ZIPFLS_API const char* zls_status_string(zls_status status);
ZIPFLS_API const char* zls_last_error(void);
ZIPFLS_API void zls_string_free(char* s);

/* ---- numerics ---------------------------------------------------------- */

ZIPFLS_API zls_status zls_softmax(const double* z, size_t n, double* out);
ZIPFLS_API zls_status zls_kl_divergence(const double* p, const double* q,
                                        size_t n, double* out);
ZIPFLS_API zls_status zls_js_divergence(const double* p, const double* q,
                                        size_t n, double* out);

/* ---- Zipf labels ------------------------------------------------------- */

/* f(r) for r = 1..n written to out[0..n-1]. */
ZIPFLS_API zls_status zls_zipf_pmf(size_t n, double alpha, double* out);

/* Soft label over num_classes entries. `ranked` lists classes from rank 1;
 * every other non-target class belongs to the uniform tail. */
ZIPFLS_API zls_status zls_zipf_soft_label(size_t num_classes, size_t target,
                                          const size_t* ranked,
                                          size_t n_ranked, double alpha,
                                          double* out);

/* Dense-vote ranking of one H x W x D channel-last feature map through the
 * linear classifier (weight: num_classes x D row-major, bias: num_classes).
 * Writes the ranked classes (capacity num_classes - 1) and their count; the
 * remaining non-target classes are the unranked tail. */
ZIPFLS_API zls_status zls_dense_rank(const double* features, size_t height,
                                     size_t width, size_t depth,
                                     const double* weight, const double* bias,
                                     size_t num_classes, size_t target,
                                     size_t* ranked_out, size_t* n_ranked);

/* ---- losses (value and d/dlogits; grad may be NULL) --------------------- */

ZIPFLS_API zls_status zls_cross_entropy(const double* z, size_t n, size_t y,
                                        double* value, double* grad);
ZIPFLS_API zls_status zls_label_smoothing_loss(const double* z, size_t n,
                                               size_t y, double epsilon,
                                               double* value, double* grad);
ZIPFLS_API zls_status zls_zipf_loss(const double* z, size_t n, size_t y,
                                    const double* soft_label, double* value,
                                    double* grad);

/* ---- rank distributions and fits -------------------------------------- */

typedef struct zls_rank_dist_s* zls_rank_dist;

ZIPFLS_API zls_status zls_simulate_gaussian(uint64_t seed, size_t n_samples,
                                            size_t n_classes, size_t top_k,
                                            zls_rank_dist* out);
ZIPFLS_API zls_status zls_rank_dist_from_array(const double* mean_probs,
                                               size_t k, zls_rank_dist* out);
ZIPFLS_API zls_status zls_rank_dist_read_csv(const char* path,
                                             zls_rank_dist* out);
/* path "-" writes to stdout. CSV header: rank,mean_prob */
ZIPFLS_API zls_status zls_rank_dist_write_csv(zls_rank_dist dist,
                                              const char* path);
ZIPFLS_API zls_status zls_rank_dist_size(zls_rank_dist dist, size_t* k);
ZIPFLS_API zls_status zls_rank_dist_values(zls_rank_dist dist, double* out,
                                           size_t capacity);
/* Least-squares line through (log rank, log prob). */
ZIPFLS_API zls_status zls_rank_dist_loglog_fit(zls_rank_dist dist,
                                               double* slope,
                                               double* intercept,
                                               double* r_squared);
ZIPFLS_API void zls_rank_dist_free(zls_rank_dist dist);

/* Fits each family in the comma-separated list (zipf, exponential,
 * lognormal), runs the goodness battery with n_mc Monte-Carlo draws and
 * returns a JSON array of reports, one per family in the given order. */
ZIPFLS_API zls_status zls_fit_json(zls_rank_dist dist, const char* families,
                                   size_t n_mc, uint64_t seed,
                                   char** json_out);

/* ---- signal-to-noise of ranks ----------------------------------------- */

typedef struct zls_snr_s* zls_snr;

/* top_k = 0 keeps every rank. */
ZIPFLS_API zls_status zls_snr_from_simulation(uint64_t seed, size_t n_samples,
                                              size_t n_classes, size_t top_k,
                                              zls_snr* out);
/* One sample per row; each row is sorted descending before analysis. */
ZIPFLS_API zls_status zls_snr_from_matrix_csv(const char* path, zls_snr* out);
ZIPFLS_API zls_status zls_snr_size(zls_snr curve, size_t* k);
ZIPFLS_API zls_status zls_snr_values(zls_snr curve, double* mean, double* std,
                                     double* snr, size_t capacity);
/* Number of leading ranks with SNR > 1, and whether all such ranks form
 * that prefix. */
ZIPFLS_API zls_status zls_snr_crossing_rank(zls_snr curve, size_t* rank,
                                            int* is_prefix);
/* CSV header: rank,mean,std,snr; infinite SNR is printed as "inf". */
ZIPFLS_API zls_status zls_snr_write_csv(zls_snr curve, const char* path);
ZIPFLS_API void zls_snr_free(zls_snr curve);

/* ---- training --------------------------------------------------------- */

ZIPFLS_API zls_status zls_default_config_json(char** json_out);

/* Trains per the JSON config; writes out_dir/metrics.csv and
 * out_dir/summary.json (creating out_dir) and returns the summary. */
ZIPFLS_API zls_status zls_train(const char* config_json, const char* out_dir,
                                char** summary_json);

/* Runs ce, ls, zipf-logit and zipf-dense for every seed and returns the
 * aggregated table as JSON. */
ZIPFLS_API zls_status zls_compare(const char* config_json,
                                  const uint64_t* seeds, size_t n_seeds,
                                  char** table_json);

#ifdef __cplusplus
}
#endif

#endif /* ZIPFLS_ZIPFLS_H_ */
