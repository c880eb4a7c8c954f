#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/ggdist.hpp"
#include "core/special.hpp"

using namespace covert;

namespace {

const std::vector<double> kShapes = {0.3, 0.5, 1.0, 1.5, 2.0, 3.0};
const std::vector<double> kScales = {0.5, 1.0, 4.0};

} // namespace

TEST_CASE("parameter guards") {
    CHECK_THROWS_AS(GGParams(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GGParams(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GGParams(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GGParams(std::nan(""), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GGParams(1.0, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    // documented numeric envelope for the shape
    CHECK_THROWS_AS(GGParams(5e-3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GGParams(200.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(GGParams(1e-2, 1.0));
    CHECK_NOTHROW(GGParams(1e2, 1.0));
}

TEST_CASE("normalizer closed forms") {
    CHECK(normalizer(GGParams(1.0, 1.0)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(normalizer(GGParams(2.0, 1.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("density integrates to one") {
    for (double p : kShapes) {
        for (double alpha : kScales) {
            GGParams params(p, alpha);
            double radius = tail_radius(params, 1e-13);
            double mass = 2.0 * integrate([&](double z) { return pdf(params, z); },
                                          0.0, radius, 1e-11);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("log_pdf values and symmetry") {
    CHECK(log_pdf(GGParams(2.0, 1.0), 0.0) ==
          doctest::Approx(-0.9189385332046727).epsilon(1e-12));
    CHECK(log_pdf(GGParams(1.0, 1.0), 0.0) ==
          doctest::Approx(std::log(0.25)).epsilon(1e-12));
    GGParams params(0.7, 2.0);
    for (double z : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        CHECK(log_pdf(params, z) == doctest::Approx(log_pdf(params, -z)).epsilon(1e-15));
        CHECK(std::exp(log_pdf(params, z)) ==
              doctest::Approx(pdf(params, z)).epsilon(1e-14));
    }
}

TEST_CASE("moments") {
    CHECK(abs_moment_p(GGParams(2.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(abs_moment_p(GGParams(1.0, 3.0)) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(abs_moment_p(GGParams(0.5, 1.0)) == doctest::Approx(4.0).epsilon(1e-12));

    CHECK(second_moment(GGParams(2.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(second_moment(GGParams(1.0, 1.0)) == doctest::Approx(8.0).epsilon(1e-12));
    // scale family: alpha -> c alpha multiplies the second moment by c^2
    CHECK(second_moment(GGParams(0.7, 3.0)) ==
          doctest::Approx(9.0 * second_moment(GGParams(0.7, 1.0))).epsilon(1e-12));
}

TEST_CASE("second moment matches quadrature") {
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        GGParams params(p, 1.0);
        double radius = tail_radius(params, 1e-14);
        double m2 = 2.0 * integrate([&](double z) { return z * z * pdf(params, z); },
                                    0.0, radius, 1e-11);
        CHECK(m2 == doctest::Approx(second_moment(params)).epsilon(1e-8));
    }
}

TEST_CASE("entropy closed forms and scaling") {
    CHECK(entropy(GGParams(2.0, 1.0)) ==
          doctest::Approx(0.5 * std::log(2.0 * M_PI * std::exp(1.0))).epsilon(1e-12));
    CHECK(entropy(GGParams(1.0, 1.0)) ==
          doctest::Approx(std::log(4.0) + 1.0).epsilon(1e-12));
    for (double p : kShapes)
        CHECK(entropy(GGParams(p, 4.0)) ==
              doctest::Approx(entropy(GGParams(p, 1.0)) + std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("kl_gg closed forms") {
    CHECK(kl_gg(1.0, GGParams(1.0, 1.0)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(kl_gg(1.1, GGParams(1.0, 1.0)) ==
          doctest::Approx(0.1 - std::log(1.1)).epsilon(1e-12));
    CHECK(kl_gg(1.2, GGParams(2.0, 1.0)) ==
          doctest::Approx(std::log(1.0 / 1.2) + 0.44 / 2.0).epsilon(1e-10));
    CHECK_THROWS_AS(kl_gg(0.0, GGParams(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("kl_gg nonnegativity and convexity near the minimum") {
    for (double p : kShapes) {
        GGParams noise(p, 1.0);
        double d_lo = kl_gg(0.9, noise);
        double d_mid = kl_gg(1.0, noise);
        double d_hi = kl_gg(1.1, noise);
        CHECK(d_mid == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(d_lo > 0.0);
        CHECK(d_hi > 0.0);
        // discrete convexity across the three points
        CHECK(d_lo + d_hi - 2.0 * d_mid > 0.0);
    }
}

TEST_CASE("kl_gg limit ratio p/2") {
    for (double p : kShapes) {
        GGParams noise(p, 1.0);
        double r = 1.0 + 1e-4;
        double ratio = kl_gg(r, noise) / ((r - 1.0) * (r - 1.0));
        CHECK(ratio == doctest::Approx(p / 2.0).epsilon(0.01));
    }
    // worked value from the closed form
    double ratio = kl_gg(1.001, GGParams(1.0, 1.0)) / (0.001 * 0.001);
    CHECK(ratio == doctest::Approx(0.49967).epsilon(1e-3));
}

TEST_CASE("kl_numeric agrees with closed forms") {
    SUBCASE("same-family pairs") {
        for (double p : kShapes) {
            for (double ratio : {1.01, 1.1, 1.5}) {
                GGParams noise(p, 1.0);
                GGParams y(p, ratio);
                CHECK(kl_numeric_gg(y, noise) ==
                      doctest::Approx(kl_gg(ratio, noise)).epsilon(1e-8));
            }
        }
    }
    SUBCASE("identical distributions") {
        GGParams noise(1.5, 2.0);
        CHECK(kl_numeric_gg(noise, noise) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("gaussian textbook formula") {
        GGParams noise(2.0, 2.0);
        GGParams y(2.0, 1.3);
        double sigma = 1.3, alpha = 2.0;
        double expect = std::log(alpha / sigma) + sigma * sigma / (2 * alpha * alpha) - 0.5;
        CHECK(kl_numeric_gg(y, noise) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("cdf and quantile") {
    for (double p : kShapes) {
        GGParams params(p, 1.5);
        CHECK(cdf(params, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
        for (double q : {0.01, 0.2, 0.5, 0.8, 0.99})
            CHECK(cdf(params, quantile(params, q)) == doctest::Approx(q).epsilon(1e-9));
        CHECK(cdf(params, 1.0) + cdf(params, -1.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // p = 2: standard normal CDF at 1
    CHECK(cdf(GGParams(2.0, 1.0), 1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-10));
}

TEST_CASE("lemma1 bounds") {
    SUBCASE("equality case: Y distributed as the noise") {
        for (double p : kShapes) {
            GGParams noise(p, 1.0);
            auto b = lemma1_bounds(abs_moment_p(noise), noise);
            CHECK(b.entropy_bound == doctest::Approx(entropy(noise)).epsilon(1e-12));
            CHECK(b.divergence_lower == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("laplace input against gaussian noise") {
        GGParams noise(2.0, 1.0);
        GGParams laplace(1.0, 1.0); // E[Y^2] = 8
        auto b = lemma1_bounds(second_moment(laplace), noise);
        CHECK(b.gamma == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
        CHECK(b.entropy_bound ==
              doctest::Approx(std::log(std::sqrt(8.0) * std::sqrt(2.0 * M_PI)) + 0.5)
                  .epsilon(1e-6));
        CHECK(entropy(laplace) <= b.entropy_bound);
        double expect_lower = std::log(1.0 / std::sqrt(8.0)) + (8.0 - 1.0) / 2.0;
        CHECK(b.divergence_lower == doctest::Approx(expect_lower).epsilon(1e-10));
        // quadrature confirms the actual divergence dominates the bound
        double actual = kl_numeric_gg(laplace, noise);
        CHECK(actual >= b.divergence_lower - 1e-9);
    }
    CHECK_THROWS_AS(lemma1_bounds(0.0, GGParams(1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("sampler determinism") {
    GGParams params(0.7, 1.3);
    auto a = sample(params, 1000, 42);
    auto b = sample(params, 1000, 42);
    auto c = sample(params, 1000, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("sampler moments") {
    const std::size_t n = 200000;
    for (double p : {0.5, 1.0, 2.0}) {
        for (double alpha : {1.0, 4.0}) {
            GGParams params(p, alpha);
            auto draw = sample(params, n, 1234);
            double sum = 0.0, sum2 = 0.0;
            for (double z : draw.values) {
                double t = std::pow(std::abs(z), p);
                sum += t;
                sum2 += t * t;
            }
            double mean = sum / n;
            double var = sum2 / n - mean * mean;
            double se = std::sqrt(var / n);
            CHECK(std::abs(mean - abs_moment_p(params)) <= 5.0 * se);
        }
    }
}

TEST_CASE("sampler entropy estimate") {
    const std::size_t n = 200000;
    GGParams params(1.5, 1.0);
    auto draw = sample(params, n, 99);
    double sum = 0.0, sum2 = 0.0;
    for (double z : draw.values) {
        double l = -log_pdf(params, z);
        sum += l;
        sum2 += l * l;
    }
    double mean = sum / n;
    double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - entropy(params)) <= 5.0 * se);
}

TEST_CASE("gaussian sampler goodness of fit") {
    const std::size_t n = 100000;
    GGParams params(2.0, 1.0);
    auto draw = sample(params, n, 7);
    std::sort(draw.values.begin(), draw.values.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = cdf(params, draw.values[i]);
        ks = std::max(ks, std::abs(f - (i + 1.0) / n));
        ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
    // critical value at significance 0.001
    CHECK(ks < 1.949 / std::sqrt(static_cast<double>(n)));
}
