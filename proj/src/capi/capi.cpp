#include "covert/covert.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "../core/budget.hpp"
#include "../core/colored.hpp"
#include "../core/decomp.hpp"
#include "../core/ggdist.hpp"
#include "../core/simkit.hpp"

namespace {

thread_local std::string g_last_error;

cov_status fail(cov_status code, const std::string& what) {
    g_last_error = what;
    return code;
}

// Runs fn, translating exceptions into status codes. invalid_argument and
// domain_error come from input validation in the core; everything else is
// either a numeric failure (runtime_error) or a bug.
template <typename Fn>
cov_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return COV_OK;
    } catch (const std::invalid_argument& e) {
        return fail(COV_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(COV_ERR_DOMAIN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(COV_ERR_INTERNAL, "out of memory");
    } catch (const std::runtime_error& e) {
        return fail(COV_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(COV_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(COV_ERR_INTERNAL, "unknown error");
    }
}

cov_status require(bool ok, const char* what) {
    return ok ? COV_OK : fail(COV_ERR_INVALID_ARGUMENT, what);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

struct cov_gg {
    covert::GGParams params;
};

struct cov_decomp {
    covert::DecompositionSpec spec;
};

struct cov_transport {
    covert::CodeTransport transport;
};

extern "C" {

const char* cov_status_name(cov_status status) {
    switch (status) {
    case COV_OK: return "ok";
    case COV_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case COV_ERR_DOMAIN: return "domain_error";
    case COV_ERR_NUMERIC: return "numeric_error";
    case COV_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char* cov_last_error(void) { return g_last_error.c_str(); }

void cov_string_free(char* s) { delete[] s; }

cov_status cov_gg_create(double p, double alpha, cov_gg** out) {
    if (cov_status s = require(out != nullptr, "out is null")) return s;
    return guarded([&] { *out = new cov_gg{covert::GGParams(p, alpha)}; });
}

void cov_gg_destroy(cov_gg* gg) { delete gg; }

double cov_gg_shape(const cov_gg* gg) { return gg ? gg->params.p : 0.0; }
double cov_gg_scale(const cov_gg* gg) { return gg ? gg->params.alpha : 0.0; }

#define COV_CHECK_HANDLE(h) \
    if (cov_status s = require((h) != nullptr, #h " is null")) return s
#define COV_CHECK_OUT(o) \
    if (cov_status s = require((o) != nullptr, #o " is null")) return s

cov_status cov_gg_normalizer(const cov_gg* gg, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::normalizer(gg->params); });
}

cov_status cov_gg_log_pdf(const cov_gg* gg, double z, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::log_pdf(gg->params, z); });
}

cov_status cov_gg_abs_moment_p(const cov_gg* gg, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::abs_moment_p(gg->params); });
}

cov_status cov_gg_second_moment(const cov_gg* gg, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::second_moment(gg->params); });
}

cov_status cov_gg_entropy(const cov_gg* gg, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::entropy(gg->params); });
}

cov_status cov_gg_cdf(const cov_gg* gg, double z, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::cdf(gg->params, z); });
}

cov_status cov_gg_kl(const cov_gg* noise, double output_scale, double* out) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::kl_gg(output_scale, noise->params); });
}

cov_status cov_gg_kl_numeric(const cov_gg* dist_y, const cov_gg* noise, double* out) {
    COV_CHECK_HANDLE(dist_y);
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::kl_numeric_gg(dist_y->params, noise->params); });
}

cov_status cov_gg_lemma1_bounds(double moment_p, const cov_gg* noise,
                                double* entropy_bound, double* divergence_lower) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(entropy_bound);
    COV_CHECK_OUT(divergence_lower);
    return guarded([&] {
        auto b = covert::lemma1_bounds(moment_p, noise->params);
        *entropy_bound = b.entropy_bound;
        *divergence_lower = b.divergence_lower;
    });
}

cov_status cov_gg_sample(const cov_gg* gg, uint64_t seed, size_t count,
                         double* out_values) {
    COV_CHECK_HANDLE(gg);
    if (cov_status s = require(out_values != nullptr || count == 0, "out_values is null"))
        return s;
    return guarded([&] {
        auto draw = covert::sample(gg->params, count, seed);
        std::memcpy(out_values, draw.values.data(), count * sizeof(double));
    });
}

cov_status cov_gg_cf(const cov_gg* gg, double t, double* out) {
    COV_CHECK_HANDLE(gg);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = covert::cf_gg(gg->params, t); });
}

cov_status cov_budget_achievable(const cov_gg* noise, double delta, double n,
                                 cov_budget_result* out) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(out);
    return guarded([&] {
        auto r = covert::gamma_achievable(covert::BudgetSpec(noise->params, delta, n));
        out->gamma_n = r.gamma_n;
        out->per_symbol_kl = r.per_symbol_kl;
        out->total_kl = r.total_kl;
        out->rate_cap_nats = r.rate_cap_nats;
        out->normalized_rate = r.normalized_rate;
    });
}

cov_status cov_budget_converse_max(const cov_gg* noise, double delta, double n,
                                   double* out) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(out);
    return guarded([&] {
        *out = covert::gamma_converse_max(covert::BudgetSpec(noise->params, delta, n));
    });
}

cov_status cov_rate_cap(const cov_gg* noise, double gamma, double* cap_log,
                        double* cap_linear) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(cap_log);
    COV_CHECK_OUT(cap_linear);
    return guarded([&] {
        *cap_log = covert::rate_cap(gamma, noise->params);
        *cap_linear = covert::rate_cap_linear(gamma, noise->params);
    });
}

cov_status cov_l_theoretical(const cov_gg* noise, cov_channel_kind kind,
                             double* value, int* exact) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(value);
    COV_CHECK_OUT(exact);
    return guarded([&] {
        auto k = kind == COV_CHANNEL_GAUSSIAN_MEMORY
                     ? covert::ChannelKind::gaussian_memory
                     : covert::ChannelKind::gg_memoryless;
        auto l = covert::L_theoretical(noise->params, k);
        *value = l.value;
        *exact = l.exact ? 1 : 0;
    });
}

cov_status cov_decomp_create(const cov_gg* noise, double beta, cov_decomp** out) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = new cov_decomp{covert::decompose(noise->params, beta)}; });
}

void cov_decomp_destroy(cov_decomp* d) { delete d; }

double cov_decomp_atom_at_zero(const cov_decomp* d) {
    return d ? d->spec.atom_at_zero : 0.0;
}

double cov_decomp_clipped_mass(const cov_decomp* d) {
    return d ? d->spec.clipped_mass : 0.0;
}

cov_status cov_decomp_sample(const cov_decomp* d, uint64_t seed, size_t count,
                             double* out_values) {
    COV_CHECK_HANDLE(d);
    if (cov_status s = require(out_values != nullptr || count == 0, "out_values is null"))
        return s;
    return guarded([&] {
        auto draw = covert::sample_input(d->spec, count, seed);
        std::memcpy(out_values, draw.values.data(), count * sizeof(double));
    });
}

cov_status cov_decomp_to_json(const cov_decomp* d, char** out_json) {
    COV_CHECK_HANDLE(d);
    COV_CHECK_OUT(out_json);
    return guarded([&] { *out_json = dup_string(covert::decomposition_to_json(d->spec)); });
}

cov_status cov_decomp_from_json(const char* json, cov_decomp** out) {
    COV_CHECK_HANDLE(json);
    COV_CHECK_OUT(out);
    return guarded([&] { *out = new cov_decomp{covert::decomposition_from_json(json)}; });
}

cov_status cov_transport_create(size_t n, const double* mu, const double* sigma,
                                cov_transport** out) {
    if (cov_status s = require(sigma != nullptr, "sigma is null")) return s;
    COV_CHECK_OUT(out);
    return guarded([&] {
        covert::Matrix m(n);
        std::memcpy(m.a.data(), sigma, n * n * sizeof(double));
        std::vector<double> mean(n, 0.0);
        if (mu) mean.assign(mu, mu + n);
        auto model = covert::ColoredNoiseModel::gaussian(std::move(mean), std::move(m));
        *out = new cov_transport{covert::whiten(model)};
    });
}

cov_status cov_transport_create_ar1(size_t n, double rho, cov_transport** out) {
    COV_CHECK_OUT(out);
    return guarded([&] {
        *out = new cov_transport{covert::whiten(covert::ColoredNoiseModel::ar1(n, rho))};
    });
}

void cov_transport_destroy(cov_transport* t) { delete t; }

size_t cov_transport_dim(const cov_transport* t) { return t ? t->transport.dim() : 0; }

double cov_transport_condition(const cov_transport* t) {
    return t ? t->transport.condition_estimate() : 0.0;
}

cov_status cov_transport_encode(const cov_transport* t, const double* white,
                                double* colored) {
    COV_CHECK_HANDLE(t);
    if (cov_status s = require(white && colored, "vector argument is null")) return s;
    return guarded([&] {
        std::vector<double> x(white, white + t->transport.dim());
        auto y = covert::transport_encoder(t->transport, x);
        std::memcpy(colored, y.data(), y.size() * sizeof(double));
    });
}

cov_status cov_transport_decode(const cov_transport* t, const double* received,
                                double* white) {
    COV_CHECK_HANDLE(t);
    if (cov_status s = require(received && white, "vector argument is null")) return s;
    return guarded([&] {
        std::vector<double> y(received, received + t->transport.dim());
        auto x = covert::transport_decoder(t->transport, y);
        std::memcpy(white, x.data(), x.size() * sizeof(double));
    });
}

cov_status cov_transport_kl_pair(const cov_transport* t, const double* input_cov,
                                 double input_cov_scalar, double* kl_colored,
                                 double* kl_white) {
    COV_CHECK_HANDLE(t);
    COV_CHECK_OUT(kl_colored);
    COV_CHECK_OUT(kl_white);
    return guarded([&] {
        std::size_t n = t->transport.dim();
        covert::Matrix s(n);
        if (input_cov) {
            std::memcpy(s.a.data(), input_cov, n * n * sizeof(double));
        } else {
            for (std::size_t i = 0; i < n; ++i) s.at(i, i) = input_cov_scalar;
        }
        auto pair = covert::kl_invariance_check(t->transport, s);
        *kl_colored = pair.kl_colored;
        *kl_white = pair.kl_white;
    });
}

cov_status cov_run_experiment(const cov_experiment_config* config,
                              cov_experiment_result* out) {
    COV_CHECK_HANDLE(config);
    COV_CHECK_OUT(out);
    return guarded([&] {
        covert::CodingExperiment exp{
            covert::GGParams(config->p, config->alpha),
            config->delta,
            config->n,
            config->message_count,
            config->threshold_gamma > 0.0
                ? config->threshold_gamma
                : covert::default_threshold_gamma(config->n),
            config->trials,
            config->seed,
            config->use_ml != 0,
            config->threads > 0 ? config->threads : 1,
        };
        auto r = covert::run_experiment(exp);
        out->gamma_n = r.gamma_n;
        out->error_rate = r.error_rate;
        out->error_ci_lo = r.error_ci.lo;
        out->error_ci_hi = r.error_ci.hi;
        out->info_density_mean = r.info_density_mean;
        out->info_mean_ci_lo = r.info_mean_ci.lo;
        out->info_mean_ci_hi = r.info_mean_ci.hi;
        out->info_density_var = r.info_density_var;
        out->theory_mean = r.theory_mean;
        out->variance_bound = r.variance_bound;
        out->trials = r.trials;
        out->errors = r.errors;
    });
}

cov_status cov_info_density(const cov_gg* noise, double gamma_n, size_t n,
                            const double* x, const double* y, double* out) {
    COV_CHECK_HANDLE(noise);
    if (cov_status s = require(x && y, "vector argument is null")) return s;
    COV_CHECK_OUT(out);
    return guarded([&] {
        std::vector<double> xs(x, x + n), ys(y, y + n);
        *out = covert::info_density(xs, ys, noise->params, gamma_n);
    });
}

cov_status cov_variance_check(const cov_gg* noise, double gamma_n,
                              int64_t sample_size, uint64_t seed,
                              double* empirical_var, double* paper_bound) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(empirical_var);
    COV_CHECK_OUT(paper_bound);
    return guarded([&] {
        auto c = covert::variance_check(noise->params, gamma_n, sample_size, seed);
        *empirical_var = c.empirical_var;
        *paper_bound = c.paper_bound;
    });
}

cov_status cov_warden_test(const cov_gg* noise, double gamma_n, int64_t n,
                           int64_t trials, uint64_t seed, cov_warden_result* out) {
    COV_CHECK_HANDLE(noise);
    COV_CHECK_OUT(out);
    return guarded([&] {
        auto r = covert::warden_test(noise->params, gamma_n, n, trials, seed);
        out->sum_errors = r.sum_errors;
        out->ci_lo = r.sum_ci.lo;
        out->ci_hi = r.sum_ci.hi;
        out->p_false_alarm = r.p_false_alarm;
        out->p_missed_detection = r.p_missed_detection;
    });
}

cov_status cov_coupled_equivalence(const cov_transport* t,
                                   const cov_experiment_config* config,
                                   int64_t* mismatches, double* error_rate) {
    COV_CHECK_HANDLE(t);
    COV_CHECK_HANDLE(config);
    COV_CHECK_OUT(mismatches);
    COV_CHECK_OUT(error_rate);
    return guarded([&] {
        covert::CodingExperiment exp{
            covert::GGParams(config->p, config->alpha),
            config->delta,
            config->n,
            config->message_count,
            config->threshold_gamma > 0.0
                ? config->threshold_gamma
                : covert::default_threshold_gamma(config->n),
            config->trials,
            config->seed,
            config->use_ml != 0,
            config->threads > 0 ? config->threads : 1,
        };
        auto report = covert::coupled_equivalence_check(exp, t->transport);
        *mismatches = report.decision_mismatches;
        *error_rate = report.error_rate_white;
    });
}

cov_status cov_run_rate_sweep_json(const char* config_json, char** out_result_json) {
    COV_CHECK_HANDLE(config_json);
    COV_CHECK_OUT(out_result_json);
    return guarded([&] {
        auto j = nlohmann::json::parse(config_json);
        std::int64_t n = j.at("n").get<std::int64_t>();
        covert::RateSweepConfig config{
            covert::GGParams(j.at("p").get<double>(), j.at("alpha").get<double>()),
            j.at("delta").get<double>(),
            n,
            j.at("eps_target").get<double>(),
            j.value("threshold_gamma", 0.0) > 0.0
                ? j["threshold_gamma"].get<double>()
                : covert::default_threshold_gamma(n),
            j.at("trials").get<std::int64_t>(),
            j.at("m_max").get<std::int64_t>(),
            j.at("seed").get<std::uint64_t>(),
            j.value("threads", 1),
        };
        auto r = covert::estimate_rate(config);
        nlohmann::json out;
        out["k_hat"] = r.k_hat;
        out["k_hat_normalized"] = r.k_hat_normalized;
        out["positive"] = r.positive;
        out["points"] = nlohmann::json::array();
        for (const auto& pt : r.points) {
            out["points"].push_back({
                {"message_count", pt.message_count},
                {"error_rate", pt.error_rate},
                {"error_ci_lo", pt.error_ci.lo},
                {"error_ci_hi", pt.error_ci.hi},
                {"info_density_mean", pt.info_density_mean},
                {"info_density_var", pt.info_density_var},
            });
        }
        *out_result_json = dup_string(out.dump(2));
    });
}

} // extern "C"
