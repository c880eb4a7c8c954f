#include "simkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rng.hpp"

namespace covert {

namespace {

constexpr double kZ95 = 1.959963984540054;

double pow_abs(double v, double p) {
    if (p == 2.0) return v * v;
    if (p == 1.0) return std::fabs(v);
    return std::pow(std::fabs(v), p);
}

// Shared per-experiment state; read-only across trials.
struct TrialContext {
    const CodingExperiment* exp;
    DecompositionSpec spec;
    std::vector<double> input_cdf; // cell cdf for the tabulated branch
    double gamma_n;
    double log_ratio;   // ln(gamma_n / alpha)
    double inv2_alpha;  // 1 / (2 alpha^p)
    double inv2_gamma;  // 1 / (2 gamma_n^p)
};

TrialContext make_context(const CodingExperiment& exp) {
    if (exp.message_count < 1) {
        throw std::invalid_argument("CodingExperiment: message_count must be >= 1");
    }
    if (exp.trials < 1 || exp.n < 1) {
        throw std::invalid_argument("CodingExperiment: n and trials must be >= 1");
    }
    BudgetSpec budget(exp.noise, exp.delta, static_cast<double>(exp.n));
    const double gamma_n = gamma_achievable(budget).gamma_n;
    TrialContext ctx{&exp,
                     decompose(exp.noise, gamma_n / exp.noise.alpha),
                     {},
                     gamma_n,
                     std::log(gamma_n / exp.noise.alpha),
                     0.5 / std::pow(exp.noise.alpha, exp.noise.p),
                     0.5 / std::pow(gamma_n, exp.noise.p)};
    if (ctx.spec.representation == Representation::tabulated) {
        ctx.input_cdf.resize(ctx.spec.weights.size() + 1, 0.0);
        for (std::size_t j = 0; j < ctx.spec.weights.size(); ++j) {
            ctx.input_cdf[j + 1] =
                ctx.input_cdf[j] + ctx.spec.weights[j] * ctx.spec.grid_step;
        }
    }
    return ctx;
}

double draw_input(const TrialContext& ctx, Rng& rng) {
    const DecompositionSpec& spec = ctx.spec;
    if (spec.atom_at_zero >= 1.0) return 0.0;
    if (spec.atom_at_zero > 0.0 && rng.uniform() < spec.atom_at_zero) return 0.0;
    switch (spec.representation) {
        case Representation::closed_form_laplace: {
            const double w = rng.gamma(1.0);
            return rng.sign() * spec.beta * spec.noise.alpha * (2.0 * w);
        }
        case Representation::closed_form_gaussian:
            return spec.gauss_sigma * rng.normal();
        case Representation::tabulated: {
            const double target = rng.uniform() * ctx.input_cdf.back();
            const auto it =
                std::upper_bound(ctx.input_cdf.begin(), ctx.input_cdf.end(), target);
            std::size_t j = static_cast<std::size_t>(
                std::max<std::ptrdiff_t>(0, (it - ctx.input_cdf.begin()) - 1));
            if (j >= spec.weights.size()) j = spec.weights.size() - 1;
            const double cell = spec.weights[j] * spec.grid_step;
            const double frac = (cell > 0.0) ? (target - ctx.input_cdf[j]) / cell : 0.5;
            return spec.grid_min + (static_cast<double>(j) + frac) * spec.grid_step;
        }
    }
    return 0.0;
}

// Codeword symbol streams are keyed on (trial seed, codeword index) so any
// codeword can be regenerated without materializing the codebook.
Rng codeword_stream(std::uint64_t trial_seed, std::int64_t index) {
    return Rng(derive_stream(trial_seed, static_cast<std::uint64_t>(index) + 1));
}

TrialOutcome run_trial_impl(const TrialContext& ctx, std::int64_t trial_index) {
    const CodingExperiment& exp = *ctx.exp;
    const std::uint64_t trial_seed = derive_stream(exp.seed, static_cast<std::uint64_t>(trial_index));
    Rng channel(derive_stream(trial_seed, 0));
    const std::int64_t m_count = exp.message_count;
    const std::int64_t sent = static_cast<std::int64_t>(channel.next_u64() % static_cast<std::uint64_t>(m_count));
    const std::int64_t n = exp.n;
    const double p = exp.noise.p;

    std::vector<double> y(static_cast<std::size_t>(n));
    double base = static_cast<double>(n) * ctx.log_ratio;
    double dist_true = 0.0;
    {
        Rng cw = codeword_stream(trial_seed, sent);
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = draw_input(ctx, cw);
            const double z = draw_one(exp.noise, channel);
            const double yi = x + z;
            y[static_cast<std::size_t>(i)] = yi;
            base += pow_abs(yi, p) * ctx.inv2_gamma;
            dist_true += pow_abs(yi - x, p) * ctx.inv2_alpha;
        }
    }
    const double i_true = base - dist_true;

    if (m_count == 1) return {true, i_true};

    const double threshold =
        std::log(static_cast<double>(m_count)) + static_cast<double>(n) * exp.threshold_gamma;

    if (exp.use_ml) {
        double best = i_true;
        std::int64_t best_idx = sent;
        bool tie = false;
        for (std::int64_t j = 0; j < m_count; ++j) {
            if (j == sent) continue;
            Rng cw = codeword_stream(trial_seed, j);
            double dist = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double x = draw_input(ctx, cw);
                dist += pow_abs(y[static_cast<std::size_t>(i)] - x, p) * ctx.inv2_alpha;
            }
            const double score = base - dist;
            if (score > best) {
                best = score;
                best_idx = j;
                tie = false;
            } else if (score == best) {
                tie = true;
            }
        }
        return {best_idx == sent && !tie, i_true};
    }

    bool ok = i_true > threshold;
    if (ok) {
        const double budget_over_threshold = base - threshold;
        for (std::int64_t j = 0; j < m_count && ok; ++j) {
            if (j == sent) continue;
            Rng cw = codeword_stream(trial_seed, j);
            double dist = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double x = draw_input(ctx, cw);
                dist += pow_abs(y[static_cast<std::size_t>(i)] - x, p) * ctx.inv2_alpha;
                if (dist > budget_over_threshold) break; // score already below threshold
            }
            if (dist < budget_over_threshold) ok = false; // impostor passed
        }
    }
    return {ok, i_true};
}

} // namespace

double default_threshold_gamma(std::int64_t n) {
    return std::pow(static_cast<double>(n), -0.75);
}

double info_density(const std::vector<double>& x, const std::vector<double>& y,
                    const GGParams& noise, double gamma_n) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("info_density: length mismatch");
    }
    if (gamma_n < noise.alpha) {
        throw std::invalid_argument("info_density: gamma_n must be >= alpha");
    }
    const double p = noise.p;
    const double inv2a = 0.5 / std::pow(noise.alpha, p);
    const double inv2g = 0.5 / std::pow(gamma_n, p);
    const double lr = std::log(gamma_n / noise.alpha);
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += lr + pow_abs(y[i], p) * inv2g - pow_abs(y[i] - x[i], p) * inv2a;
    }
    return total;
}

TrialOutcome run_coding_trial(const CodingExperiment& exp, std::int64_t trial_index) {
    const TrialContext ctx = make_context(exp);
    return run_trial_impl(ctx, trial_index);
}

ConfidenceInterval proportion_ci(std::int64_t successes, std::int64_t total) {
    const double nn = static_cast<double>(total);
    const double phat = static_cast<double>(successes) / nn;
    if (phat < 0.1 || phat > 0.9) {
        // Wilson interval behaves near the boundary.
        const double z2 = kZ95 * kZ95;
        const double denom = 1.0 + z2 / nn;
        const double center = (phat + z2 / (2.0 * nn)) / denom;
        const double half =
            (kZ95 / denom) * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
        double lo = center - half;
        double hi = center + half;
        if (successes == 0) lo = 0.0;
        if (successes == total) hi = 1.0;
        return {std::max(0.0, lo), std::min(1.0, hi)};
    }
    const double half = kZ95 * std::sqrt(phat * (1.0 - phat) / nn);
    return {std::max(0.0, phat - half), std::min(1.0, phat + half)};
}

ExperimentResult run_experiment(const CodingExperiment& exp) {
    const TrialContext ctx = make_context(exp);
    const std::int64_t trials = exp.trials;
    std::vector<char> ok(static_cast<std::size_t>(trials), 0);
    std::vector<double> itrue(static_cast<std::size_t>(trials), 0.0);

    const int threads = std::max(1, exp.threads);
    auto worker = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t t = lo; t < hi; ++t) {
            const TrialOutcome out = run_trial_impl(ctx, t);
            ok[static_cast<std::size_t>(t)] = out.decoded_ok ? 1 : 0;
            itrue[static_cast<std::size_t>(t)] = out.info_density_sent;
        }
    };
    if (threads == 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (trials + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction so thread count never changes the result.
    std::int64_t errors = 0;
    double sum = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        if (!ok[static_cast<std::size_t>(t)]) ++errors;
        sum += itrue[static_cast<std::size_t>(t)];
    }
    const double mean_i = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const double d = itrue[static_cast<std::size_t>(t)] - mean_i;
        ss += d * d;
    }
    const double var_i = (trials > 1) ? ss / static_cast<double>(trials - 1) : 0.0;
    const double nn = static_cast<double>(exp.n);

    ExperimentResult res;
    res.gamma_n = ctx.gamma_n;
    res.trials = trials;
    res.errors = errors;
    res.error_rate = static_cast<double>(errors) / static_cast<double>(trials);
    res.error_ci = proportion_ci(errors, trials);
    res.info_density_mean = mean_i / nn;
    const double se_mean = std::sqrt(var_i / static_cast<double>(trials)) / nn;
    res.info_mean_ci = {res.info_density_mean - kZ95 * se_mean,
                        res.info_density_mean + kZ95 * se_mean};
    res.info_density_var = var_i / nn;
    res.theory_mean = ctx.log_ratio;
    res.variance_bound = (exp.noise.p <= 1.0)
                             ? info_density_variance_bound(exp.noise, ctx.gamma_n)
                             : std::numeric_limits<double>::quiet_NaN();
    return res;
}

double info_density_variance_bound(const GGParams& noise, double gamma_n) {
    if (noise.p > 1.0) {
        throw std::invalid_argument(
            "info_density_variance_bound: valid only for p <= 1");
    }
    if (gamma_n < noise.alpha) {
        throw std::invalid_argument("info_density_variance_bound: gamma_n >= alpha required");
    }
    const double p = noise.p;
    const double a = noise.alpha;
    const double g = gamma_n;
    const double ratio_gamma = std::exp(std::lgamma(3.0 / p) - std::lgamma(1.0 / p));
    const double two_p = std::pow(2.0, 2.0 / p);
    const double inner = a * two_p * (g * g - a * a) * ratio_gamma +
                         (a - g) * (a - g) * two_p * a * a * ratio_gamma;
    const double pref = 0.25 / (std::pow(g, 2.0 * p) * std::pow(a, 2.0 * p));
    return pref * std::pow(std::fabs(inner), p);
}

VarianceCheck variance_check(const GGParams& noise, double gamma_n,
                             std::int64_t sample_size, std::uint64_t seed) {
    if (sample_size < 2) {
        throw std::invalid_argument("variance_check: sample_size must be >= 2");
    }
    const double bound = info_density_variance_bound(noise, gamma_n);
    const DecompositionSpec spec = decompose(noise, gamma_n / noise.alpha);
    Rng rng(derive_stream(seed, 0x7a5ULL));
    const double p = noise.p;
    const double inv2a = 0.5 / std::pow(noise.alpha, p);
    const double inv2g = 0.5 / std::pow(gamma_n, p);
    const double lr = std::log(gamma_n / noise.alpha);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < sample_size; ++i) {
        const double x = sample_input_one(spec, rng);
        const double z = draw_one(noise, rng);
        const double yv = x + z;
        const double is = lr + pow_abs(yv, p) * inv2g - pow_abs(z, p) * inv2a;
        const double d = is - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (is - mean);
    }
    const double var = m2 / static_cast<double>(sample_size - 1);
    return {var, bound, mean};
}

RateSweepResult estimate_rate(const RateSweepConfig& config) {
    if (config.m_max < 2) {
        throw std::invalid_argument("estimate_rate: m_max must be >= 2");
    }
    RateSweepResult result;
    result.k_hat = 0.0;
    result.positive = false;

    std::int64_t m = 2;
    while (m <= config.m_max) {
        CodingExperiment exp{config.noise,
                             config.delta,
                             config.n,
                             m,
                             config.threshold_gamma,
                             config.trials,
                             derive_stream(config.seed, static_cast<std::uint64_t>(m)),
                             false,
                             config.threads};
        const ExperimentResult r = run_experiment(exp);
        result.points.push_back({m, r.error_rate, r.error_ci, r.info_density_mean,
                                 r.info_density_var});
        if (r.error_rate > config.eps_target) break;
        result.positive = true;
        result.k_hat = std::log(static_cast<double>(m));
        const std::int64_t next = static_cast<std::int64_t>(
            std::llround(static_cast<double>(m) * std::sqrt(2.0)));
        m = std::max(m + 1, next);
    }
    result.k_hat_normalized =
        result.k_hat / std::sqrt(static_cast<double>(config.n) * config.delta);
    return result;
}

WardenResult warden_test(const GGParams& noise, double gamma_n, std::int64_t n,
                         std::int64_t trials, std::uint64_t seed, int threads) {
    if (gamma_n < noise.alpha) {
        throw std::invalid_argument("warden_test: gamma_n must be >= alpha");
    }
    if (n < 1 || trials < 1) {
        throw std::invalid_argument("warden_test: n and trials must be >= 1");
    }
    const double p = noise.p;
    const double llr_const = std::log(noise.alpha / gamma_n);
    const double coeff = 0.5 / std::pow(noise.alpha, p) - 0.5 / std::pow(gamma_n, p);
    const GGParams out_law(p, gamma_n);

    std::vector<char> fa(static_cast<std::size_t>(trials), 0);
    std::vector<char> md(static_cast<std::size_t>(trials), 0);
    auto worker = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t t = lo; t < hi; ++t) {
            Rng rng(derive_stream(seed, static_cast<std::uint64_t>(t)));
            double llr0 = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double y = draw_one(noise, rng);
                llr0 += llr_const + coeff * pow_abs(y, p);
            }
            double llr1 = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double y = draw_one(out_law, rng);
                llr1 += llr_const + coeff * pow_abs(y, p);
            }
            fa[static_cast<std::size_t>(t)] = (llr0 > 0.0) ? 1 : 0;
            md[static_cast<std::size_t>(t)] = (llr1 <= 0.0) ? 1 : 0;
        }
    };
    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker(0, trials);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (trials + nthreads - 1) / nthreads;
        for (int w = 0; w < nthreads; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min<std::int64_t>(trials, lo + chunk);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    std::int64_t n_fa = 0, n_md = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        n_fa += fa[static_cast<std::size_t>(t)];
        n_md += md[static_cast<std::size_t>(t)];
    }
    const double tt = static_cast<double>(trials);
    const double pfa = static_cast<double>(n_fa) / tt;
    const double pmd = static_cast<double>(n_md) / tt;
    const double sum = pfa + pmd;
    const double se = std::sqrt(pfa * (1.0 - pfa) / tt + pmd * (1.0 - pmd) / tt);
    WardenResult res;
    res.sum_errors = sum;
    res.sum_ci = {sum - kZ95 * se, sum + kZ95 * se};
    res.p_false_alarm = pfa;
    res.p_missed_detection = pmd;
    return res;
}

EquivalenceReport coupled_equivalence_check(const CodingExperiment& exp,
                                            const CodeTransport& transport) {
    if (exp.noise.p != 2.0) {
        throw std::invalid_argument(
            "coupled_equivalence_check: white noise must be Gaussian (p = 2)");
    }
    if (static_cast<std::size_t>(exp.n) != transport.dim()) {
        throw std::invalid_argument("coupled_equivalence_check: blocklength must match transport dimension");
    }
    const TrialContext ctx = make_context(exp);
    const std::int64_t n = exp.n;
    const std::int64_t m_count = exp.message_count;
    const double p = exp.noise.p;
    const double threshold =
        std::log(static_cast<double>(m_count)) + static_cast<double>(n) * exp.threshold_gamma;

    auto decide = [&](const std::vector<double>& yv,
                      const std::vector<std::vector<double>>& codebook) -> std::int64_t {
        double base = static_cast<double>(n) * ctx.log_ratio;
        for (double v : yv) base += pow_abs(v, p) * ctx.inv2_gamma;
        std::int64_t winner = -1;
        for (std::int64_t j = 0; j < m_count; ++j) {
            double dist = 0.0;
            const auto& cw = codebook[static_cast<std::size_t>(j)];
            for (std::int64_t i = 0; i < n; ++i) {
                dist += pow_abs(yv[static_cast<std::size_t>(i)] -
                                cw[static_cast<std::size_t>(i)],
                                p) *
                        ctx.inv2_alpha;
            }
            if (base - dist > threshold) {
                if (winner >= 0) return -1; // not unique
                winner = j;
            }
        }
        return winner;
    };

    EquivalenceReport report{exp.trials, 0, 0.0, 0.0};
    std::int64_t err_w = 0, err_c = 0;
    for (std::int64_t t = 0; t < exp.trials; ++t) {
        const std::uint64_t trial_seed = derive_stream(exp.seed, static_cast<std::uint64_t>(t));
        Rng channel(derive_stream(trial_seed, 0));
        const std::int64_t sent = static_cast<std::int64_t>(
            channel.next_u64() % static_cast<std::uint64_t>(m_count));

        std::vector<std::vector<double>> codebook(static_cast<std::size_t>(m_count));
        for (std::int64_t j = 0; j < m_count; ++j) {
            Rng cw = codeword_stream(trial_seed, j);
            auto& word = codebook[static_cast<std::size_t>(j)];
            word.resize(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < n; ++i) word[static_cast<std::size_t>(i)] = draw_input(ctx, cw);
        }
        std::vector<double> zw(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) zw[static_cast<std::size_t>(i)] = draw_one(exp.noise, channel);

        // White channel.
        std::vector<double> yw(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            yw[static_cast<std::size_t>(i)] =
                codebook[static_cast<std::size_t>(sent)][static_cast<std::size_t>(i)] +
                zw[static_cast<std::size_t>(i)];
        }
        const std::int64_t dw = decide(yw, codebook);

        // Colored channel with the coupled noise realization.
        const std::vector<double> x_col =
            transport_encoder(transport, codebook[static_cast<std::size_t>(sent)]);
        const std::vector<double> z_col = transport.color_noise(zw);
        std::vector<double> y_col(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            y_col[static_cast<std::size_t>(i)] =
                x_col[static_cast<std::size_t>(i)] + z_col[static_cast<std::size_t>(i)];
        }
        const std::vector<double> y_back = transport_decoder(transport, y_col);
        const std::int64_t dc = decide(y_back, codebook);

        if (dw != dc) ++report.decision_mismatches;
        if (dw != sent) ++err_w;
        if (dc != sent) ++err_c;
    }
    report.error_rate_white = static_cast<double>(err_w) / static_cast<double>(exp.trials);
    report.error_rate_colored = static_cast<double>(err_c) / static_cast<double>(exp.trials);
    return report;
}

} // namespace covert
