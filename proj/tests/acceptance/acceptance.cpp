// Acceptance suite: one PASS/FAIL line per criterion, exit code equals the
// number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/budget.hpp"
#include "core/colored.hpp"
#include "core/decomp.hpp"
#include "core/ggdist.hpp"
#include "core/simkit.hpp"

using namespace covert;

namespace {

int g_failures = 0;

void report(int index, const char* title, bool pass, const std::string& detail) {
    std::printf("%2d %-42s %s%s%s\n", index, title, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

const std::vector<double> kShapes = {0.3, 0.5, 1.0, 1.5, 2.0, 3.0};
const std::vector<double> kScales = {0.5, 1.0, 4.0};

// 1: closed-form KL vs quadrature across the parameter grid.
void criterion_divergence_oracle() {
    double worst = 0.0;
    for (double p : kShapes)
        for (double alpha : kScales)
            for (double ratio : {1.001, 1.01, 1.1, 1.5}) {
                GGParams noise(p, alpha);
                double closed = kl_gg(ratio * alpha, noise);
                double numeric = kl_numeric_gg(GGParams(p, ratio * alpha), noise);
                worst = std::max(worst, std::abs(closed - numeric));
            }
    std::ostringstream d;
    d << "max |closed - quadrature| = " << worst;
    report(1, "divergence closed form vs quadrature", worst <= 1e-8, d.str());
}

// 2: kl / (ratio - 1)^2 -> p / 2.
void criterion_limit_ratio() {
    double worst_rel = 0.0;
    for (double p : kShapes) {
        double r = 1.0 + 1e-4;
        double ratio = kl_gg(r, GGParams(p, 1.0)) / ((r - 1.0) * (r - 1.0));
        worst_rel = std::max(worst_rel, std::abs(ratio - p / 2.0) / (p / 2.0));
    }
    std::ostringstream d;
    d << "max relative deviation from p/2 = " << worst_rel;
    report(2, "small-signal divergence ratio", worst_rel <= 0.01, d.str());
}

// 3: sampler moments at N = 1e6 per grid point.
void criterion_sampler_moments() {
    const std::size_t n = 1000000;
    bool pass = true;
    double worst_sigmas = 0.0;
    std::uint64_t seed = 1000;
    for (double p : kShapes)
        for (double alpha : kScales) {
            GGParams params(p, alpha);
            auto draw = sample(params, n, seed++);
            double s1 = 0.0, s1q = 0.0, s2 = 0.0, s2q = 0.0;
            for (double z : draw.values) {
                double a = std::pow(std::abs(z), p);
                double b = z * z;
                s1 += a;
                s1q += a * a;
                s2 += b;
                s2q += b * b;
            }
            double m1 = s1 / n, v1 = s1q / n - m1 * m1;
            double m2 = s2 / n, v2 = s2q / n - m2 * m2;
            double dev1 = std::abs(m1 - abs_moment_p(params)) / std::sqrt(v1 / n);
            double dev2 = std::abs(m2 - second_moment(params)) / std::sqrt(v2 / n);
            worst_sigmas = std::max({worst_sigmas, dev1, dev2});
            if (dev1 > 5.0 || dev2 > 5.0) pass = false;
        }
    std::ostringstream d;
    d << "worst deviation = " << worst_sigmas << " standard errors";
    report(3, "sampler moment agreement", pass, d.str());
}

// 4: convolution identity of the covert input construction.
void criterion_decomposition() {
    const std::size_t n = 100000;
    const double ks_threshold = 1.949 / std::sqrt(static_cast<double>(n));
    bool pass = true;
    double worst_ks = 0.0;
    std::uint64_t seed = 4000;
    for (double p : {1.0, 0.7, 0.5})
        for (double beta : {1.01, 1.1, 2.0}) {
            GGParams noise(p, 1.0);
            auto spec = decompose(noise, beta);
            auto x = sample_input(spec, n, seed++);
            auto z = sample(noise, n, seed++);
            std::vector<double> sum(n);
            for (std::size_t i = 0; i < n; ++i) sum[i] = x.values[i] + z.values[i];
            std::sort(sum.begin(), sum.end());
            GGParams out_law(p, beta);
            double ks = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double f = cdf(out_law, sum[i]);
                ks = std::max(ks, std::abs(f - (i + 1.0) / n));
                ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
            }
            worst_ks = std::max(worst_ks, ks);
            if (ks >= ks_threshold) pass = false;
        }

    // deconvolution branch against the closed form at p = 1
    double worst_l1 = 0.0;
    for (double beta : {1.01, 1.1, 2.0}) {
        auto tab = decompose_tabulated(GGParams(1.0, 1.0), beta);
        GGParams cont(1.0, beta);
        const double mass = 1.0 - 1.0 / (beta * beta);
        double l1 = std::abs(tab.atom_at_zero - 1.0 / (beta * beta));
        for (std::size_t j = 0; j < tab.weights.size(); ++j) {
            double z = tab.grid_min + (j + 0.5) * tab.grid_step;
            l1 += std::abs(tab.weights[j] - mass * pdf(cont, z)) * tab.grid_step;
        }
        worst_l1 = std::max(worst_l1, l1);
        if (l1 > 1e-3) pass = false;
    }
    std::ostringstream d;
    d << "worst KS = " << worst_ks << " (threshold " << ks_threshold
      << "), worst L1 = " << worst_l1;
    report(4, "self-decomposition convolution oracle", pass, d.str());
}

// 5: the achievability choice keeps the total divergence inside the budget.
void criterion_covertness() {
    bool pass = true;
    double worst_ratio_high = 0.0, worst_ratio_low = 1.0;
    for (double p : {0.3, 0.5, 1.0, 2.0})
        for (double alpha : kScales)
            for (double delta : {1e-3, 1e-2, 1e-1})
                for (double n : {1e2, 1e4, 1e6}) {
                    auto r = gamma_achievable(BudgetSpec(GGParams(p, alpha), delta, n));
                    double ratio = r.total_kl / delta;
                    worst_ratio_high = std::max(worst_ratio_high, ratio);
                    if (ratio > 1.0 + 1e-12) pass = false;
                    if (n >= 1e4) {
                        worst_ratio_low = std::min(worst_ratio_low, ratio);
                        if (ratio < 0.99) pass = false;
                    }
                }
    std::ostringstream d;
    d << "budget use in [" << worst_ratio_low << ", " << worst_ratio_high << "]";
    report(5, "covertness budget guarantee", pass, d.str());
}

// 6: converse dominates achievability; both gaps give sqrt(2/p) at n = 1e8.
void criterion_sandwich() {
    bool pass = true;
    double worst_rel = 0.0;
    for (double p : {0.5, 1.0, 2.0}) {
        BudgetSpec spec(GGParams(p, 1.0), 0.01, 1e8);
        double ach = gamma_achievable(spec).gamma_n;
        double con = gamma_converse_max(spec);
        if (con < ach) pass = false;
        double scale = std::sqrt(spec.n / spec.delta);
        double target = std::sqrt(2.0 / p);
        for (double gap : {scale * (ach - 1.0), scale * (con - 1.0)}) {
            worst_rel = std::max(worst_rel, std::abs(gap - target) / target);
            if (std::abs(gap - target) / target > 0.02) pass = false;
        }
    }
    // dominance across a wider grid
    for (double p : {0.3, 0.5, 1.0, 2.0})
        for (double delta : {1e-3, 1e-1})
            for (double n : {1e2, 1e6}) {
                BudgetSpec spec(GGParams(p, 1.0), delta, n);
                if (gamma_converse_max(spec) < gamma_achievable(spec).gamma_n)
                    pass = false;
            }
    std::ostringstream d;
    d << "worst normalized-gap deviation = " << worst_rel;
    report(6, "converse/achievability sandwich", pass, d.str());
}

// 7: information-density mean and the closed-form variance bound.
void criterion_info_density() {
    const std::int64_t n = 1000000;
    bool pass = true;
    std::ostringstream d;
    for (double p : {0.5, 1.0}) {
        GGParams noise(p, 1.0);
        double gamma_n = gamma_achievable(BudgetSpec(noise, 0.5, 1e4)).gamma_n;
        auto check = variance_check(noise, gamma_n, n, 7000 + std::lround(10 * p));
        double theory = std::log(gamma_n);
        double se = std::sqrt(check.empirical_var / static_cast<double>(n));
        double dev = std::abs(check.empirical_mean - theory) / se;
        if (dev > 5.0) pass = false;
        if (check.empirical_var > check.paper_bound) pass = false;
        d << "p=" << p << ": mean dev " << dev << " se, var " << check.empirical_var
          << " <= bound " << check.paper_bound << "; ";
    }
    report(7, "information density statistics", pass, d.str());
}

// 8: square-root-law trend, formula level and Monte Carlo.
void criterion_rate_trend() {
    bool pass = true;
    std::ostringstream d;

    double worst_rel = 0.0;
    for (double p : {0.5, 1.0, 2.0}) {
        auto vals = normalized_rate_trend(GGParams(p, 1.0), 0.01, {1e8});
        double target = std::sqrt(2.0 / p);
        worst_rel = std::max(worst_rel, std::abs(vals[0] - target) / target);
        if (std::abs(vals[0] - target) / target > 0.01) pass = false;
    }
    d << "formula deviation " << worst_rel << "; ";

    // Monte Carlo rate estimates. The codebook caps and per-blocklength
    // Feinstein slacks keep the scan affordable; the measured rates stay
    // lower bounds of the channel-limited values.
    GGParams noise(2.0, 1.0);
    const double delta = 0.5;
    struct Point {
        std::int64_t n;
        double slack;
        std::int64_t trials;
        std::int64_t m_max;
    };
    const std::vector<Point> grid = {{400, 2.0 / 400, 400, 1024},
                                     {1600, 2.0 / 1600, 120, 32768},
                                     {6400, 4.0 / 6400, 25, 70000}};
    std::vector<double> k_hats, normalized;
    for (const auto& pt : grid) {
        RateSweepConfig config{noise,     delta,      pt.n, 0.05, pt.slack,
                               pt.trials, pt.m_max, 8800 + static_cast<std::uint64_t>(pt.n),
                               1};
        auto r = estimate_rate(config);
        k_hats.push_back(r.k_hat);
        normalized.push_back(r.k_hat_normalized);
        if (!r.positive) pass = false;
        double cap = std::sqrt(pt.n / delta) *
                     std::log(gamma_converse_max(
                         BudgetSpec(noise, delta, static_cast<double>(pt.n))));
        if (r.k_hat_normalized > cap) pass = false;
        d << "n=" << pt.n << " K=" << r.k_hat << " (norm " << r.k_hat_normalized
          << "); ";
    }
    for (std::size_t i = 0; i + 1 < k_hats.size(); ++i)
        if (k_hats[i] >= k_hats[i + 1]) pass = false;
    report(8, "square-root-law trend", pass, d.str());
}

// 9: colored-channel transport reproduces white-channel decisions exactly.
void criterion_channel_equivalence() {
    auto transport = whiten(ColoredNoiseModel::ar1(64, 0.9));
    Matrix input_cov = Matrix::identity(64);
    for (std::size_t i = 0; i < 64; ++i) input_cov.at(i, i) = 0.01;
    auto pair = kl_invariance_check(transport, input_cov);
    bool kl_ok = std::abs(pair.kl_colored - pair.kl_white) <= 1e-9;

    CodingExperiment exp{GGParams(2.0, 1.0), 0.5, 64, 4,
                         default_threshold_gamma(64), 10000, 900, false, 1};
    auto r = coupled_equivalence_check(exp, transport);
    bool pass = kl_ok && r.decision_mismatches == 0 &&
                r.error_rate_white == r.error_rate_colored;
    std::ostringstream d;
    d << "|kl diff| = " << std::abs(pair.kl_colored - pair.kl_white)
      << ", mismatches " << r.decision_mismatches << "/" << r.trials;
    report(9, "noise-with-memory channel equivalence", pass, d.str());
}

// 10: detection error of the optimal test against the Pinsker bound.
void criterion_warden() {
    bool pass = true;
    std::ostringstream d;
    GGParams noise(1.0, 1.0);
    for (double delta : {0.02, 0.1}) {
        const std::int64_t n = 10000;
        double gamma_n =
            gamma_achievable(BudgetSpec(noise, delta, static_cast<double>(n))).gamma_n;
        auto r = warden_test(noise, gamma_n, n, 2000, 9990 + std::lround(100 * delta));
        double bound = 1.0 - std::sqrt(delta / 2.0);
        if (r.sum_ci.hi < bound) pass = false;
        d << "delta=" << delta << ": sum " << r.sum_errors << " ci [" << r.sum_ci.lo
          << "," << r.sum_ci.hi << "] >= " << bound << "; ";
    }
    report(10, "warden detection bound", pass, d.str());
}

// 11: byte-identical serialized results for equal seeds across thread counts.
void criterion_determinism() {
    auto serialize = [](const ExperimentResult& r) {
        nlohmann::json j;
        j["gamma_n"] = r.gamma_n;
        j["error_rate"] = r.error_rate;
        j["error_ci"] = {r.error_ci.lo, r.error_ci.hi};
        j["info_density_mean"] = r.info_density_mean;
        j["info_mean_ci"] = {r.info_mean_ci.lo, r.info_mean_ci.hi};
        j["info_density_var"] = r.info_density_var;
        j["theory_mean"] = r.theory_mean;
        j["trials"] = r.trials;
        j["errors"] = r.errors;
        return j.dump();
    };
    CodingExperiment base{GGParams(1.0, 1.0), 0.5, 200, 16,
                          default_threshold_gamma(200), 500, 1100, false, 1};
    std::vector<std::string> outputs;
    for (int threads : {1, 2, 8}) {
        CodingExperiment exp = base;
        exp.threads = threads;
        outputs.push_back(serialize(run_experiment(exp)));
    }
    bool pass = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    // rerun with the same seed reproduces, a new seed does not
    CodingExperiment again = base;
    pass = pass && serialize(run_experiment(again)) == outputs[0];
    CodingExperiment other = base;
    other.seed = 1101;
    bool differs = serialize(run_experiment(other)) != outputs[0];
    report(11, "determinism across thread counts", pass && differs,
           differs ? "" : "seed change did not alter the result");
}

} // namespace

int main() {
    criterion_divergence_oracle();
    criterion_limit_ratio();
    criterion_sampler_moments();
    criterion_decomposition();
    criterion_covertness();
    criterion_sandwich();
    criterion_info_density();
    criterion_rate_trend();
    criterion_channel_equivalence();
    criterion_warden();
    criterion_determinism();
    if (g_failures == 0) std::printf("all criteria passed\n");
    return g_failures;
}
