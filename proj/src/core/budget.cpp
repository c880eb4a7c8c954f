#include "budget.hpp"

#include <cmath>
#include <stdexcept>

namespace covert {

BudgetSpec::BudgetSpec(GGParams noise_, double delta_, double n_)
    : noise(noise_), delta(delta_), n(n_) {
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw std::invalid_argument("BudgetSpec: delta must be positive");
    }
    if (!std::isfinite(n) || n < 1.0 || n > 1e9) {
        throw std::invalid_argument("BudgetSpec: n must be in [1, 1e9]");
    }
}

BudgetResult gamma_achievable(const BudgetSpec& spec) {
    const double p = spec.noise.p;
    const double alpha = spec.noise.alpha;
    const double a = std::sqrt(2.0 * p * spec.delta / spec.n);
    const double gamma_n = alpha * std::pow(1.0 + a, 1.0 / p);
    BudgetResult out;
    out.gamma_n = gamma_n;
    out.per_symbol_kl = kl_gg(gamma_n, spec.noise);
    out.total_kl = spec.n * out.per_symbol_kl;
    out.rate_cap_nats = std::log(gamma_n / alpha);
    out.normalized_rate = std::sqrt(spec.n / spec.delta) * out.rate_cap_nats;
    return out;
}

double gamma_converse_max(const BudgetSpec& spec) {
    const double alpha = spec.noise.alpha;
    const double target = spec.delta / spec.n;
    if (target <= 0.0) return alpha;
    // kl_gg is zero at gamma = alpha, increasing and unbounded above it.
    double lo = alpha;
    double hi = alpha * 2.0;
    while (kl_gg(hi, spec.noise) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kl_gg(mid, spec.noise) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if ((hi - lo) <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double rate_cap(double gamma, const GGParams& noise) {
    if (gamma < noise.alpha) {
        throw std::invalid_argument("rate_cap: gamma must be >= alpha");
    }
    return std::log(gamma / noise.alpha);
}

double rate_cap_linear(double gamma, const GGParams& noise) {
    if (gamma < noise.alpha) {
        throw std::invalid_argument("rate_cap_linear: gamma must be >= alpha");
    }
    return gamma / noise.alpha - 1.0;
}

LValue L_theoretical(const GGParams& noise, ChannelKind kind) {
    if (kind == ChannelKind::gaussian_memory) {
        return {1.0, true};
    }
    const double value = std::sqrt(2.0 / noise.p);
    const bool exact = (noise.p <= 1.0) || (noise.p == 2.0);
    return {value, exact};
}

std::vector<double> normalized_rate_trend(const GGParams& noise, double delta,
                                          const std::vector<double>& n_list) {
    std::vector<double> out;
    out.reserve(n_list.size());
    for (double n : n_list) {
        BudgetSpec spec(noise, delta, n);
        out.push_back(gamma_achievable(spec).normalized_rate);
    }
    return out;
}

} // namespace covert
