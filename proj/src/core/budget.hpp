#pragma once

#include <vector>

#include "ggdist.hpp"

namespace covert {

struct BudgetSpec {
    GGParams noise;
    double delta; // total KL budget over n uses, nats
    double n;     // blocklength; double so formula-only ops reach 1e9

    BudgetSpec(GGParams noise_, double delta_, double n_);
};

struct BudgetResult {
    double gamma_n;
    double per_symbol_kl;
    double total_kl;
    double rate_cap_nats;   // ln(gamma_n / alpha)
    double normalized_rate; // sqrt(n/delta) * ln(gamma_n / alpha)
};

// gamma_n = alpha (1 + sqrt(2 p delta / n))^{1/p}; total KL is guaranteed
// to stay within delta.
BudgetResult gamma_achievable(const BudgetSpec& spec);

// Largest gamma >= alpha with kl_gg(gamma) <= delta / n, by bisection.
double gamma_converse_max(const BudgetSpec& spec);

// Per-symbol mutual information cap ln(gamma / alpha).
double rate_cap(double gamma, const GGParams& noise);
// The looser linear cap gamma / alpha - 1.
double rate_cap_linear(double gamma, const GGParams& noise);

enum class ChannelKind { gg_memoryless, gaussian_memory };

struct LValue {
    double value;
    bool exact; // false means the value is only an upper bound
};

LValue L_theoretical(const GGParams& noise, ChannelKind kind);

// sqrt(n/delta) * ln(gamma_n / alpha) for each n in n_list.
std::vector<double> normalized_rate_trend(const GGParams& noise, double delta,
                                          const std::vector<double>& n_list);

} // namespace covert
