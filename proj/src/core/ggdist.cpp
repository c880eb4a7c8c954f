#include "ggdist.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"
#include "special.hpp"

namespace covert {

namespace {
constexpr double kMinShape = 1e-2;
constexpr double kMaxShape = 1e2;
} // namespace

GGParams::GGParams(double p_, double alpha_) : p(p_), alpha(alpha_) {
    if (!std::isfinite(p) || !std::isfinite(alpha) || p <= 0.0 || alpha <= 0.0) {
        throw std::invalid_argument("GGParams: p and alpha must be finite and positive");
    }
    if (p < kMinShape || p > kMaxShape) {
        throw std::invalid_argument("GGParams: p outside supported range [1e-2, 1e2]");
    }
}

double log_normalizer(const GGParams& params) {
    const double p = params.p;
    return std::log(p) - ((p + 1.0) / p) * std::log(2.0) - std::lgamma(1.0 / p);
}

double normalizer(const GGParams& params) {
    return std::exp(log_normalizer(params));
}

double log_pdf(const GGParams& params, double z) {
    if (!std::isfinite(z)) throw std::invalid_argument("log_pdf: z must be finite");
    const double scaled = std::pow(std::fabs(z) / params.alpha, params.p);
    return log_normalizer(params) - std::log(params.alpha) - 0.5 * scaled;
}

double pdf(const GGParams& params, double z) {
    return std::exp(log_pdf(params, z));
}

double abs_moment_p(const GGParams& params) {
    return 2.0 * std::pow(params.alpha, params.p) / params.p;
}

double second_moment(const GGParams& params) {
    const double p = params.p;
    const double lg = std::lgamma(3.0 / p) - std::lgamma(1.0 / p);
    return std::exp((2.0 / p) * std::log(2.0) + lg) * params.alpha * params.alpha;
}

double entropy(const GGParams& params) {
    return std::log(params.alpha) - log_normalizer(params) + 1.0 / params.p;
}

double kl_gg(double output_scale, const GGParams& noise) {
    if (!std::isfinite(output_scale) || output_scale <= 0.0) {
        throw std::invalid_argument("kl_gg: output scale must be positive");
    }
    const double r = output_scale / noise.alpha;
    return -std::log(r) + (std::pow(r, noise.p) - 1.0) / noise.p;
}

double cdf(const GGParams& params, double z) {
    const double a = 1.0 / params.p;
    const double x = 0.5 * std::pow(std::fabs(z) / params.alpha, params.p);
    const double half_tail = 0.5 * gamma_p(a, x);
    return (z >= 0.0) ? 0.5 + half_tail : 0.5 - half_tail;
}

double quantile(const GGParams& params, double q) {
    if (q <= 0.0 || q >= 1.0) throw std::invalid_argument("quantile: q in (0,1) required");
    if (q == 0.5) return 0.0;
    const double tail = (q > 0.5) ? 2.0 * (1.0 - q) : 2.0 * q;
    const double w = gamma_upper_quantile(1.0 / params.p, tail);
    const double mag = params.alpha * std::pow(2.0 * w, 1.0 / params.p);
    return (q > 0.5) ? mag : -mag;
}

double tail_radius(const GGParams& params, double tail_mass) {
    const double w = gamma_upper_quantile(1.0 / params.p, tail_mass);
    return params.alpha * std::pow(2.0 * w, 1.0 / params.p);
}

double kl_numeric(const std::function<double(double)>& log_pdf_y, double radius,
                  const GGParams& noise, double tol) {
    auto integrand = [&](double z) {
        const double ly = log_pdf_y(z);
        if (ly < -745.0) return 0.0; // f_Y underflows; f ln f -> 0
        return std::exp(ly) * (ly - log_pdf(noise, z));
    };
    // Integrand is even in all supported uses only when f_Y is even; do not
    // assume it and integrate both halves explicitly.
    const double left = integrate(integrand, -radius, 0.0, 0.5 * tol);
    const double right = integrate(integrand, 0.0, radius, 0.5 * tol);
    const double result = left + right;
    if (!std::isfinite(result)) {
        throw std::runtime_error("kl_numeric: quadrature failed to converge");
    }
    return result;
}

double kl_numeric_gg(const GGParams& dist_y, const GGParams& noise) {
    const double ry = tail_radius(dist_y, 1e-13);
    const double rz = tail_radius(noise, 1e-13);
    const double radius = std::max(ry, rz);
    auto ly = [&](double z) { return log_pdf(dist_y, z); };
    return kl_numeric(ly, radius, noise);
}

Lemma1Bounds lemma1_bounds(double moment_p, const GGParams& noise) {
    if (!std::isfinite(moment_p) || moment_p <= 0.0) {
        throw std::invalid_argument("lemma1_bounds: moment must be positive");
    }
    const double gamma = std::pow(0.5 * noise.p * moment_p, 1.0 / noise.p);
    Lemma1Bounds out;
    out.gamma = gamma;
    out.entropy_bound = std::log(gamma) - log_normalizer(noise) + 1.0 / noise.p;
    out.divergence_lower = kl_gg(gamma, noise);
    return out;
}

double draw_one(const GGParams& params, Rng& rng) {
    const double w = rng.gamma(1.0 / params.p);
    const double mag =
        params.alpha * std::pow(2.0 * w, 1.0 / params.p);
    return rng.sign() * mag;
}

GGSample sample(const GGParams& params, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("sample: count must be >= 1");
    GGSample out;
    out.seed = seed;
    out.values.resize(count);
    Rng rng(derive_stream(seed, 0x6767ULL));
    for (std::size_t i = 0; i < count; ++i) {
        out.values[i] = draw_one(params, rng);
    }
    return out;
}

} // namespace covert
