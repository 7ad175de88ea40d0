#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fiscalforge {

/// Concentration parameters of a Dirichlet distribution. Every component is
/// strictly positive and there are at least two of them.
class ConcentrationVector {
public:
    ConcentrationVector(std::initializer_list<double> values);
    explicit ConcentrationVector(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    double total() const;

    bool operator==(const ConcentrationVector&) const = default;

private:
    std::vector<double> values_;
};

/// ln Γ(x) for x > 0. Lanczos approximation (g = 7, 9 terms), with the
/// recurrence Γ(x) = Γ(x+1)/x below 0.5. Absolute error is below 1e-10 on
/// [1e-3, 1e4]; accuracy below 1e-3 is not guaranteed.
double ln_gamma(double x);

/// ψ(x) = d/dx ln Γ(x) for x > 0. Upward recurrence to x >= 6, then the
/// asymptotic Bernoulli series.
double digamma(double x);

/// KL( Dir(alpha) || Dir(beta) ) in closed form.
double dirichlet_kl(std::span<const double> alpha, std::span<const double> beta);
double dirichlet_kl(const ConcentrationVector& alpha, const ConcentrationVector& beta);

}  // namespace fiscalforge
