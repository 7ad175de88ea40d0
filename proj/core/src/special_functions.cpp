#include "fiscalforge/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

namespace {

void require_positive_finite(double x, const char* fn) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                          std::to_string(x));
    }
}

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_ln_gamma(double x) {
    // Valid for x >= 0.5.
    const double z = x - 1.0;
    double series = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        series += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
           std::log(series);
}

}  // namespace

ConcentrationVector::ConcentrationVector(std::initializer_list<double> values)
    : ConcentrationVector(std::vector<double>(values)) {}

ConcentrationVector::ConcentrationVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw ShapeError("concentration vector needs at least 2 components");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw DomainError("concentration components must be finite and > 0");
        }
    }
}

double ConcentrationVector::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

double ln_gamma(double x) {
    require_positive_finite(x, "ln_gamma");
    if (x < 0.5) {
        // ln Γ(x) = ln Γ(x+1) - ln x
        return lanczos_ln_gamma(x + 1.0) - std::log(x);
    }
    return lanczos_ln_gamma(x);
}

double digamma(double x) {
    require_positive_finite(x, "digamma");
    double acc = 0.0;
    while (x < 6.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // ln x - 1/(2x) - sum B_2k / (2k x^2k)
    const double tail =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    return acc + std::log(x) - 0.5 * inv - tail;
}

double dirichlet_kl(std::span<const double> alpha, std::span<const double> beta) {
    if (alpha.size() != beta.size()) {
        throw ShapeError("dirichlet_kl: length mismatch (" + std::to_string(alpha.size()) +
                         " vs " + std::to_string(beta.size()) + ")");
    }
    double alpha_total = 0.0;
    double beta_total = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (!(alpha[j] > 0.0) || !(beta[j] > 0.0) || !std::isfinite(alpha[j]) ||
            !std::isfinite(beta[j])) {
            throw DomainError("dirichlet_kl: components must be finite and > 0");
        }
        alpha_total += alpha[j];
        beta_total += beta[j];
    }
    const double psi_total = digamma(alpha_total);
    double kl = ln_gamma(alpha_total) - ln_gamma(beta_total);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        kl -= ln_gamma(alpha[j]) - ln_gamma(beta[j]);
        kl += (alpha[j] - beta[j]) * (digamma(alpha[j]) - psi_total);
    }
    return kl;
}

double dirichlet_kl(const ConcentrationVector& alpha, const ConcentrationVector& beta) {
    return dirichlet_kl(alpha.values(), beta.values());
}

}  // namespace fiscalforge
