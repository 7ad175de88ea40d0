#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fiscalforge/errors.hpp"
#include "fiscalforge/special_functions.hpp"
#include "test_support.hpp"

using namespace fiscalforge;

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) {
        xs.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return xs;
}

// Monte-Carlo estimate of E_p[ln p(x) - ln q(x)] for two Beta laws, using
// std::lgamma for the normalizers.
double beta_kl_monte_carlo(double a1, double a2, double b1, double b2, int samples,
                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> ga(a1, 1.0);
    std::gamma_distribution<double> gb(a2, 1.0);
    const double ln_norm_p = std::lgamma(a1 + a2) - std::lgamma(a1) - std::lgamma(a2);
    const double ln_norm_q = std::lgamma(b1 + b2) - std::lgamma(b1) - std::lgamma(b2);
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = ga(rng);
        const double v = gb(rng);
        const double x = u / (u + v);
        const double lx = std::log(x);
        const double l1x = std::log1p(-x);
        const double lp = ln_norm_p + (a1 - 1.0) * lx + (a2 - 1.0) * l1x;
        const double lq = ln_norm_q + (b1 - 1.0) * lx + (b2 - 1.0) * l1x;
        acc += lp - lq;
    }
    return acc / samples;
}

}  // namespace

TEST_CASE("ln_gamma at analytic points") {
    CHECK(std::abs(ln_gamma(1.0)) <= 1e-10);
    CHECK(std::abs(ln_gamma(5.0) - std::log(24.0)) <= 1e-10);
    CHECK(std::abs(ln_gamma(0.5) - 0.5 * std::log(std::numbers::pi)) <= 1e-10);
    CHECK(std::abs(ln_gamma(2.0)) <= 1e-10);
}

TEST_CASE("digamma at analytic points") {
    CHECK(std::abs(digamma(1.0) + kEulerGamma) <= 1e-10);
    CHECK(std::abs(digamma(2.0) - (1.0 - kEulerGamma)) <= 1e-10);
    CHECK(std::abs(digamma(0.5) - (-kEulerGamma - 2.0 * std::numbers::ln2)) <= 1e-10);
}

TEST_CASE("special functions reject non-positive and non-finite input") {
    for (double bad : {0.0, -1.0, -0.5, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::infinity()}) {
        CHECK_THROWS_AS(ln_gamma(bad), DomainError);
        CHECK_THROWS_AS(digamma(bad), DomainError);
    }
}

TEST_CASE("ln_gamma and digamma agree with Boost.Math over [1e-3, 1e6]") {
    for (double x : log_grid(1e-3, 1e6, 400)) {
        const double lg_ref = boost::math::lgamma(x);
        const double dg_ref = boost::math::digamma(x);
        CAPTURE(x);
        // ln Γ(1e6) ~ 1.3e7, whose ulp alone is ~2e-9; allow a few ulps of the
        // value on top of the absolute budget.
        CHECK(std::abs(ln_gamma(x) - lg_ref) <= 1e-10 + 8e-16 * std::abs(lg_ref));
        CHECK(std::abs(digamma(x) - dg_ref) <= 1e-10);
    }
}

TEST_CASE("recurrences hold on a log grid over [1e-2, 1e4]") {
    for (double x : log_grid(1e-2, 1e4, 300)) {
        CAPTURE(x);
        CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-9);
        CHECK(std::abs(ln_gamma(x + 1.0) - ln_gamma(x) - std::log(x)) <= 1e-9);
    }
}

TEST_CASE("dirichlet_kl examples") {
    const ConcentrationVector a{5.0, 3.0};
    CHECK(dirichlet_kl(a, a) == 0.0);
    CHECK(std::abs(dirichlet_kl({2.0, 1.0}, {1.0, 1.0}) - (std::numbers::ln2 - 0.5)) <= 1e-9);

    const double frozen = testing::reference_values()["dirichlet_kl_5_3_vs_6_4"].get<double>();
    const double v = dirichlet_kl({5.0, 3.0}, {6.0, 4.0});
    CHECK(v >= 0.0);
    CHECK(std::abs(v - frozen) <= 1e-10);
}

TEST_CASE("dirichlet_kl errors") {
    const std::vector<double> two{1.0, 2.0};
    const std::vector<double> three{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(dirichlet_kl(two, three), ShapeError);
    const std::vector<double> zero{0.0, 2.0};
    CHECK_THROWS_AS(dirichlet_kl(zero, two), DomainError);
    const std::vector<double> neg{1.0, -2.0};
    CHECK_THROWS_AS(dirichlet_kl(two, neg), DomainError);
    CHECK_THROWS_AS(ConcentrationVector({1.0}), ShapeError);
    CHECK_THROWS_AS(ConcentrationVector({1.0, 0.0}), DomainError);
}

TEST_CASE("dirichlet_kl matches a Monte-Carlo estimate") {
    constexpr int kSamples = 1'000'000;
    const double mc1 = beta_kl_monte_carlo(2.0, 1.0, 1.0, 1.0, kSamples, 11);
    CHECK(std::abs(dirichlet_kl({2.0, 1.0}, {1.0, 1.0}) - mc1) <= 3e-3);
    const double mc2 = beta_kl_monte_carlo(5.0, 3.0, 6.0, 4.0, kSamples, 12);
    CHECK(std::abs(dirichlet_kl({5.0, 3.0}, {6.0, 4.0}) - mc2) <= 3e-3);
}

TEST_CASE("dirichlet_kl is non-negative and vanishes on identical inputs") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> comp(0.1, 50.0);
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = dim(rng);
        std::vector<double> a(k), b(k);
        for (int j = 0; j < k; ++j) {
            a[j] = comp(rng);
            b[j] = comp(rng);
        }
        CHECK(dirichlet_kl(a, b) >= -1e-12);
        CHECK(std::abs(dirichlet_kl(a, a)) <= 1e-12);
    }
}
