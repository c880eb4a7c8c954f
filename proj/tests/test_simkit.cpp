#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/budget.hpp"
#include "core/simkit.hpp"

using namespace covert;

TEST_CASE("info density closed-form cases") {
    GGParams noise(2.0, 1.0);
    SUBCASE("gamma equal to alpha gives zero") {
        std::vector<double> x(5, 0.0), y = {0.3, -1.2, 0.0, 2.5, -0.1};
        CHECK(info_density(x, y, noise, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("single symbol worked value") {
        std::vector<double> x = {0.5}, y = {0.5};
        double expect = std::log(1.1) + 0.25 / (2.0 * 1.21);
        CHECK(info_density(x, y, noise, 1.1) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(expect == doctest::Approx(0.198617).epsilon(1e-4));
    }
    SUBCASE("length mismatch") {
        std::vector<double> x(3, 0.0), y(4, 0.0);
        CHECK_THROWS_AS(info_density(x, y, noise, 1.1), std::invalid_argument);
    }
}

TEST_CASE("default threshold slack") {
    CHECK(default_threshold_gamma(256) == doctest::Approx(std::pow(256.0, -0.75)).epsilon(1e-12));
}

TEST_CASE("info density mean matches ln(gamma/alpha)") {
    // per-symbol statistics through the coding pipeline itself
    GGParams noise(1.0, 1.0);
    double gamma_n = gamma_achievable(BudgetSpec(noise, 4.0, 64)).gamma_n;
    auto check = variance_check(noise, gamma_n, 200000, 31);
    double theory = std::log(gamma_n);
    double se = std::sqrt(check.empirical_var / 200000.0);
    CHECK(std::abs(check.empirical_mean - theory) <= 5.0 * se);
    CHECK(check.empirical_var <= check.paper_bound);
}

TEST_CASE("variance bound behavior") {
    GGParams noise(1.0, 1.0);
    SUBCASE("monotone decrease toward zero") {
        double b1 = info_density_variance_bound(noise, 1.1);
        double b2 = info_density_variance_bound(noise, 1.01);
        double b3 = info_density_variance_bound(noise, 1.001);
        CHECK(b1 > b2);
        CHECK(b2 > b3);
        CHECK(b3 > 0.0);
        CHECK(b3 < 0.01);
    }
    SUBCASE("degenerate point") {
        auto check = variance_check(noise, 1.0, 1000, 4);
        CHECK(check.empirical_var == 0.0);
        CHECK(check.paper_bound == 0.0);
    }
    SUBCASE("p above one rejected") {
        CHECK_THROWS_AS(info_density_variance_bound(GGParams(2.0, 1.0), 1.1),
                        std::invalid_argument);
    }
}

TEST_CASE("coding trial and experiment basics") {
    // budget chosen so the mean information density sqrt(delta * n) clears
    // the decoding threshold ln|M| + n^{1/4} with a wide margin
    CodingExperiment exp{GGParams(2.0, 1.0), 1.0, 400, 2,
                         default_threshold_gamma(400), 2000, 99, false, 1};
    auto r = run_experiment(exp);
    CHECK(r.trials == 2000);
    CHECK(r.error_rate < 0.05);
    CHECK(r.error_ci.lo >= 0.0);
    CHECK(r.error_ci.hi <= 1.0);
    CHECK(r.error_ci.lo <= r.error_rate);
    CHECK(r.error_rate <= r.error_ci.hi);
    // mean info density per symbol near ln(gamma_n)
    double se = std::sqrt(r.info_density_var / (400.0 * 2000.0));
    CHECK(std::abs(r.info_density_mean - r.theory_mean) <= 5.0 * se);
}

TEST_CASE("degenerate message set always decodes") {
    CodingExperiment exp{GGParams(1.0, 1.0), 0.01, 64, 1,
                         default_threshold_gamma(64), 200, 5, false, 1};
    auto r = run_experiment(exp);
    CHECK(r.errors == 0);
}

TEST_CASE("oversized codebook fails to decode") {
    // ln|M| far above n * ln(gamma_n / alpha) forces errors
    GGParams noise(2.0, 1.0);
    CodingExperiment exp{noise, 0.01, 100, 4096,
                         default_threshold_gamma(100), 50, 21, false, 1};
    auto r = run_experiment(exp);
    CHECK(r.error_rate > 0.5);
}

TEST_CASE("error rate monotone in message count") {
    GGParams noise(2.0, 1.0);
    double prev = -1.0;
    for (std::int64_t m : {2, 64, 2048}) {
        CodingExperiment exp{noise, 0.5, 100, m, 1.0 / 100.0, 400, 77, false, 1};
        auto r = run_experiment(exp);
        CHECK(r.error_rate >= prev - 0.05);
        prev = r.error_rate;
    }
}

TEST_CASE("determinism across thread counts") {
    GGParams noise(1.0, 1.0);
    CodingExperiment a{noise, 0.5, 64, 8, default_threshold_gamma(64), 300, 123, false, 1};
    CodingExperiment b = a;
    b.threads = 4;
    auto ra = run_experiment(a);
    auto rb = run_experiment(b);
    CHECK(ra.error_rate == rb.error_rate);
    CHECK(ra.errors == rb.errors);
    CHECK(ra.info_density_mean == rb.info_density_mean);
    CHECK(ra.info_density_var == rb.info_density_var);
}

TEST_CASE("trial level reproducibility") {
    CodingExperiment exp{GGParams(2.0, 1.0), 0.1, 128, 16,
                         default_threshold_gamma(128), 10, 55, false, 1};
    for (std::int64_t t = 0; t < 5; ++t) {
        auto a = run_coding_trial(exp, t);
        auto b = run_coding_trial(exp, t);
        CHECK(a.decoded_ok == b.decoded_ok);
        CHECK(a.info_density_sent == b.info_density_sent);
    }
}

TEST_CASE("rate sweep") {
    SUBCASE("no budget means no rate") {
        RateSweepConfig config{GGParams(2.0, 1.0), 1e-12, 100, 0.05,
                               default_threshold_gamma(100), 100, 64, 9, 1};
        auto r = estimate_rate(config);
        CHECK_FALSE(r.positive);
        CHECK(r.k_hat == 0.0);
    }
    SUBCASE("generous budget gives a positive rate below the cap") {
        RateSweepConfig config{GGParams(2.0, 1.0), 2.0, 256, 0.05,
                               1.0 / 256.0, 200, 256, 10, 1};
        auto r = estimate_rate(config);
        CHECK(r.positive);
        CHECK(r.k_hat > 0.0);
        CHECK(r.k_hat_normalized == doctest::Approx(r.k_hat / std::sqrt(256.0 * 2.0)));
        double cap = 256.0 * std::log(gamma_converse_max(
                                 BudgetSpec(GGParams(2.0, 1.0), 2.0, 256)));
        CHECK(r.k_hat <= cap);
        // monotone error curve along the scan
        for (std::size_t i = 0; i + 1 < r.points.size(); ++i)
            CHECK(r.points[i].message_count < r.points[i + 1].message_count);
    }
}

TEST_CASE("warden likelihood ratio test") {
    GGParams noise(1.0, 1.0);
    SUBCASE("no transmission is undetectable") {
        auto r = warden_test(noise, 1.0, 100, 500, 13);
        CHECK(r.sum_errors == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("pinsker bound at a covert operating point") {
        double delta = 0.1;
        double n = 1000;
        double gamma_n = gamma_achievable(BudgetSpec(noise, delta, n)).gamma_n;
        auto r = warden_test(noise, gamma_n, 1000, 2000, 14);
        double pinsker = 1.0 - std::sqrt(delta / 2.0);
        CHECK(r.sum_ci.hi >= pinsker);
        CHECK(r.p_false_alarm >= 0.0);
        CHECK(r.p_missed_detection >= 0.0);
    }
    SUBCASE("large signals are detected") {
        auto r = warden_test(noise, 3.0, 200, 500, 15);
        CHECK(r.sum_errors < 0.2);
    }
}

TEST_CASE("coupled white and colored experiments agree exactly") {
    auto transport = whiten(ColoredNoiseModel::ar1(16, 0.9));
    CodingExperiment exp{GGParams(2.0, 1.0), 0.5, 16, 4,
                         default_threshold_gamma(16), 400, 70, false, 1};
    auto report = coupled_equivalence_check(exp, transport);
    CHECK(report.trials == 400);
    CHECK(report.decision_mismatches == 0);
    CHECK(report.error_rate_white == report.error_rate_colored);
}

TEST_CASE("confidence interval sanity") {
    auto mid = proportion_ci(50, 100);
    CHECK(mid.lo > 0.39);
    CHECK(mid.hi < 0.61);
    auto edge = proportion_ci(0, 100);
    CHECK(edge.lo == 0.0);
    CHECK(edge.hi > 0.0);
    CHECK(edge.hi < 0.06);
    auto top = proportion_ci(100, 100);
    CHECK(top.hi == 1.0);
    CHECK(top.lo < 1.0);
    CHECK(top.lo > 0.94);
}
