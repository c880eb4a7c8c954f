/* Covert-communication simulation library: C API.
 *
 * All functions return cov_status; outputs are written through pointers.
 * Handles are opaque and must be released with the matching _destroy call.
 * Strings returned through char** are owned by the caller and released with
 * cov_string_free. On failure, cov_last_error() returns a human-readable
 * detail string for the calling thread.
 */
#ifndef COVERT_H
#define COVERT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cov_status {
    COV_OK = 0,
    COV_ERR_INVALID_ARGUMENT = 1,
    COV_ERR_DOMAIN = 2,
    COV_ERR_NUMERIC = 3,
    COV_ERR_INTERNAL = 4
} cov_status;

const char* cov_status_name(cov_status status);
const char* cov_last_error(void);
void cov_string_free(char* s);

/* ---- Generalized Gaussian noise law N_p(0, alpha^p) ---- */

typedef struct cov_gg cov_gg;

cov_status cov_gg_create(double p, double alpha, cov_gg** out);
void cov_gg_destroy(cov_gg* gg);
double cov_gg_shape(const cov_gg* gg);
double cov_gg_scale(const cov_gg* gg);

cov_status cov_gg_normalizer(const cov_gg* gg, double* out);
cov_status cov_gg_log_pdf(const cov_gg* gg, double z, double* out);
cov_status cov_gg_abs_moment_p(const cov_gg* gg, double* out);
cov_status cov_gg_second_moment(const cov_gg* gg, double* out);
cov_status cov_gg_entropy(const cov_gg* gg, double* out);
cov_status cov_gg_cdf(const cov_gg* gg, double z, double* out);

/* Closed-form D(N_p(0, gamma^p) || noise). */
cov_status cov_gg_kl(const cov_gg* noise, double output_scale, double* out);
/* Quadrature D(dist_y || noise); the independent oracle for cov_gg_kl. */
cov_status cov_gg_kl_numeric(const cov_gg* dist_y, const cov_gg* noise, double* out);
/* Entropy upper bound and divergence lower bound at gamma^p = (p/2) moment_p. */
cov_status cov_gg_lemma1_bounds(double moment_p, const cov_gg* noise,
                                double* entropy_bound, double* divergence_lower);
/* count i.i.d. draws into out_values; deterministic in (gg, seed, count). */
cov_status cov_gg_sample(const cov_gg* gg, uint64_t seed, size_t count,
                         double* out_values);
/* Real characteristic function E[cos(t Z)]. */
cov_status cov_gg_cf(const cov_gg* gg, double t, double* out);

/* ---- Covertness budget ---- */

typedef struct cov_budget_result {
    double gamma_n;
    double per_symbol_kl;
    double total_kl;
    double rate_cap_nats;
    double normalized_rate;
} cov_budget_result;

cov_status cov_budget_achievable(const cov_gg* noise, double delta, double n,
                                 cov_budget_result* out);
cov_status cov_budget_converse_max(const cov_gg* noise, double delta, double n,
                                   double* out);
/* cap_log = ln(gamma/alpha); cap_linear = gamma/alpha - 1. */
cov_status cov_rate_cap(const cov_gg* noise, double gamma, double* cap_log,
                        double* cap_linear);

typedef enum cov_channel_kind {
    COV_CHANNEL_GG_MEMORYLESS = 0,
    COV_CHANNEL_GAUSSIAN_MEMORY = 1
} cov_channel_kind;

/* exact is 1 when the constant is tight, 0 when it is only an upper bound. */
cov_status cov_l_theoretical(const cov_gg* noise, cov_channel_kind kind,
                             double* value, int* exact);

/* ---- Covert input construction (self-decomposition) ---- */

typedef struct cov_decomp cov_decomp;

cov_status cov_decomp_create(const cov_gg* noise, double beta, cov_decomp** out);
void cov_decomp_destroy(cov_decomp* d);
double cov_decomp_atom_at_zero(const cov_decomp* d);
double cov_decomp_clipped_mass(const cov_decomp* d);
cov_status cov_decomp_sample(const cov_decomp* d, uint64_t seed, size_t count,
                             double* out_values);
cov_status cov_decomp_to_json(const cov_decomp* d, char** out_json);
cov_status cov_decomp_from_json(const char* json, cov_decomp** out);

/* ---- Whitening transport for noise with memory ---- */

typedef struct cov_transport cov_transport;

/* sigma is n*n row major, symmetric positive definite; mu may be NULL for 0. */
cov_status cov_transport_create(size_t n, const double* mu, const double* sigma,
                                cov_transport** out);
cov_status cov_transport_create_ar1(size_t n, double rho, cov_transport** out);
void cov_transport_destroy(cov_transport* t);
size_t cov_transport_dim(const cov_transport* t);
double cov_transport_condition(const cov_transport* t);
cov_status cov_transport_encode(const cov_transport* t, const double* white,
                                double* colored);
cov_status cov_transport_decode(const cov_transport* t, const double* received,
                                double* white);
/* Gaussian KL on both sides; input covariance is input_cov (n*n row major)
 * or input_cov_scalar * I when input_cov is NULL. */
cov_status cov_transport_kl_pair(const cov_transport* t, const double* input_cov,
                                 double input_cov_scalar, double* kl_colored,
                                 double* kl_white);

/* ---- Monte Carlo coding experiments ---- */

typedef struct cov_experiment_config {
    double p;
    double alpha;
    double delta;
    int64_t n;
    int64_t message_count;
    int64_t trials;
    double threshold_gamma; /* <= 0 selects the default n^{-3/4} */
    uint64_t seed;
    int use_ml;
    int threads;
} cov_experiment_config;

typedef struct cov_experiment_result {
    double gamma_n;
    double error_rate;
    double error_ci_lo;
    double error_ci_hi;
    double info_density_mean;
    double info_mean_ci_lo;
    double info_mean_ci_hi;
    double info_density_var;
    double theory_mean;
    double variance_bound; /* NaN for p > 1 */
    int64_t trials;
    int64_t errors;
} cov_experiment_result;

cov_status cov_run_experiment(const cov_experiment_config* config,
                              cov_experiment_result* out);

cov_status cov_info_density(const cov_gg* noise, double gamma_n, size_t n,
                            const double* x, const double* y, double* out);

cov_status cov_variance_check(const cov_gg* noise, double gamma_n,
                              int64_t sample_size, uint64_t seed,
                              double* empirical_var, double* paper_bound);

typedef struct cov_warden_result {
    double sum_errors;
    double ci_lo;
    double ci_hi;
    double p_false_alarm;
    double p_missed_detection;
} cov_warden_result;

cov_status cov_warden_test(const cov_gg* noise, double gamma_n, int64_t n,
                           int64_t trials, uint64_t seed, cov_warden_result* out);

/* Couples one noise stream through the transport: white-channel and
 * colored-channel decoding decisions must agree trial by trial. Requires
 * p = 2, alpha = 1 and n equal to the transport dimension. */
cov_status cov_coupled_equivalence(const cov_transport* t,
                                   const cov_experiment_config* config,
                                   int64_t* mismatches, double* error_rate);

/* Rate sweep over a geometric |M| grid. config_json fields: p, alpha, delta,
 * n, eps_target, trials, m_max, seed, and optionally threshold_gamma and
 * threads. Returns a JSON object with the per-point error curve and k_hat. */
cov_status cov_run_rate_sweep_json(const char* config_json, char** out_result_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COVERT_H */
