#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace covert {

// Generalized Gaussian law N_p(0, alpha^p) with density
// f(z) = (c_p / alpha) * exp(-|z|^p / (2 alpha^p)).
struct GGParams {
    double p;
    double alpha;

    GGParams(double p_, double alpha_);
};

struct GGSample {
    std::vector<double> values;
    std::uint64_t seed;
};

// ln c_p = ln p - ((p+1)/p) ln 2 - lgamma(1/p), kept in log domain so small
// shape parameters do not overflow Gamma(1/p).
double log_normalizer(const GGParams& params);
double normalizer(const GGParams& params);

double log_pdf(const GGParams& params, double z);
double pdf(const GGParams& params, double z);

// E|Z|^p = 2 alpha^p / p.
double abs_moment_p(const GGParams& params);

// E[Z^2] = 2^{2/p} alpha^2 Gamma(3/p) / Gamma(1/p).
double second_moment(const GGParams& params);

// Differential entropy ln(alpha / c_p) + 1/p, in nats.
double entropy(const GGParams& params);

// D(N_p(0, gamma^p) || N_p(0, alpha^p)) in closed form.
double kl_gg(double output_scale, const GGParams& noise);

// CDF and quantile via the regularized incomplete gamma function.
double cdf(const GGParams& params, double z);
double quantile(const GGParams& params, double q);

// Radius T with P(|Z| > T) <= tail_mass.
double tail_radius(const GGParams& params, double tail_mass);

// Quadrature estimate of D(P_Y || P_Z) for a density given by its log-pdf,
// integrated over (-radius, radius). Throws if the quadrature does not
// resolve the integrand (non-finite result).
double kl_numeric(const std::function<double(double)>& log_pdf_y, double radius,
                  const GGParams& noise, double tol = 1e-10);

// Convenience: both distributions generalized Gaussian.
double kl_numeric_gg(const GGParams& dist_y, const GGParams& noise);

struct Lemma1Bounds {
    double entropy_bound;
    double divergence_lower;
    double gamma;
};

// Bounds evaluated at gamma^p = (p/2) E|Y|^p.
Lemma1Bounds lemma1_bounds(double moment_p, const GGParams& noise);

// i.i.d. draws via Z = S * (2 alpha^p W)^{1/p}, W ~ Gamma(1/p, 1).
GGSample sample(const GGParams& params, std::size_t count, std::uint64_t seed);

// Single draw from an already-derived stream (used by the simulation loop).
class Rng;
double draw_one(const GGParams& params, Rng& rng);

} // namespace covert
