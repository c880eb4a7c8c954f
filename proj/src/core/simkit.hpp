#pragma once

#include <cstdint>
#include <vector>

#include "budget.hpp"
#include "colored.hpp"
#include "decomp.hpp"
#include "ggdist.hpp"

namespace covert {

struct ConfidenceInterval {
    double lo;
    double hi;
};

struct CodingExperiment {
    GGParams noise;
    double delta;
    std::int64_t n;
    std::int64_t message_count;
    double threshold_gamma; // Feinstein slack, nats per symbol
    std::int64_t trials;
    std::uint64_t seed;
    bool use_ml = false; // comparison decoder; threshold decoding is the default
    int threads = 1;
};

struct ExperimentResult {
    double gamma_n;
    double error_rate;
    ConfidenceInterval error_ci;
    double info_density_mean; // nats per symbol
    ConfidenceInterval info_mean_ci;
    double info_density_var; // (nats per symbol)^2, from var(i)/n
    double theory_mean;      // ln(gamma_n / alpha)
    double variance_bound;   // closed-form bound for p <= 1, NaN otherwise
    std::int64_t trials;
    std::int64_t errors;
};

// Default Feinstein slack n^{-3/4}.
double default_threshold_gamma(std::int64_t n);

// Information density of (x, y) against output law N_p(0, gamma_n^p), nats.
double info_density(const std::vector<double>& x, const std::vector<double>& y,
                    const GGParams& noise, double gamma_n);

struct TrialOutcome {
    bool decoded_ok;
    double info_density_sent;
};

// One random-coding trial; fully determined by (exp, trial_index).
TrialOutcome run_coding_trial(const CodingExperiment& exp, std::int64_t trial_index);

// All trials, with the per-trial streams merged order-independently.
ExperimentResult run_experiment(const CodingExperiment& exp);

// Closed-form bound on the per-symbol variance of the information density
// for p in (0, 1]; throws for p > 1.
double info_density_variance_bound(const GGParams& noise, double gamma_n);

struct VarianceCheck {
    double empirical_var;
    double paper_bound;
    double empirical_mean; // per symbol
};

VarianceCheck variance_check(const GGParams& noise, double gamma_n,
                             std::int64_t sample_size, std::uint64_t seed);

struct RateSweepConfig {
    GGParams noise;
    double delta;
    std::int64_t n;
    double eps_target;
    double threshold_gamma;
    std::int64_t trials;
    std::int64_t m_max;
    std::uint64_t seed;
    int threads = 1;
};

struct RatePoint {
    std::int64_t message_count;
    double error_rate;
    ConfidenceInterval error_ci;
    double info_density_mean;
    double info_density_var;
};

struct RateSweepResult {
    std::vector<RatePoint> points;
    double k_hat;            // largest passing ln|M|, 0 if none
    double k_hat_normalized; // k_hat / sqrt(n * delta)
    bool positive;           // some |M| >= 2 passed
};

// Ascending scan over a geometric |M| grid; stops at the first failure.
RateSweepResult estimate_rate(const RateSweepConfig& config);

struct WardenResult {
    double sum_errors; // P_FA + P_MD at the equal-prior LRT operating point
    ConfidenceInterval sum_ci;
    double p_false_alarm;
    double p_missed_detection;
};

WardenResult warden_test(const GGParams& noise, double gamma_n, std::int64_t n,
                         std::int64_t trials, std::uint64_t seed, int threads = 1);

struct EquivalenceReport {
    std::int64_t trials;
    std::int64_t decision_mismatches;
    double error_rate_white;
    double error_rate_colored;
};

// Theorem-1 style coupling: the same white draws pushed through the
// transport must give identical decoding decisions on the colored channel.
// Gaussian white noise only (exp.noise.p must be 2, alpha 1).
EquivalenceReport coupled_equivalence_check(const CodingExperiment& exp,
                                            const CodeTransport& transport);

ConfidenceInterval proportion_ci(std::int64_t successes, std::int64_t total);

} // namespace covert
