#include "fiscalforge/optimizer.hpp"

#include <cmath>
#include <string>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

OptimizerKind parse_optimizer_kind(std::string_view name) {
    if (name == "adam") return OptimizerKind::adam;
    if (name == "sgd") return OptimizerKind::sgd;
    throw ContractError("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

std::string_view to_string(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "sgd";
}

Optimizer::Optimizer(OptimizerKind kind, double beta1, double beta2, double epsilon)
    : kind_(kind), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

void Optimizer::step(std::span<double> params, std::span<const double> grad, double learning_rate) {
    if (params.size() != grad.size()) {
        throw ShapeError("optimizer: gradient length " + std::to_string(grad.size()) +
                         " does not match parameter length " + std::to_string(params.size()));
    }
    if (kind_ == OptimizerKind::sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grad[i];
        ++t_;
        return;
    }
    if (m_.size() != params.size()) {
        m_.assign(params.size(), 0.0);
        v_.assign(params.size(), 0.0);
        t_ = 0;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double m_hat = m_[i] / c1;
        const double v_hat = v_[i] / c2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
}

}  // namespace fiscalforge
