#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fiscalforge {

enum class OptimizerKind { sgd, adam };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view to_string(OptimizerKind kind);

/// First-order descent step on a flat parameter vector. Adam keeps its moment
/// estimates between calls; SGD is stateless.
class Optimizer {
public:
    explicit Optimizer(OptimizerKind kind = OptimizerKind::adam, double beta1 = 0.9,
                       double beta2 = 0.999, double epsilon = 1e-8);

    /// params -= lr * direction(grad)
    void step(std::span<double> params, std::span<const double> grad, double learning_rate);

    OptimizerKind kind() const { return kind_; }
    std::uint64_t steps() const { return t_; }

private:
    OptimizerKind kind_;
    double beta1_;
    double beta2_;
    double epsilon_;
    std::uint64_t t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

}  // namespace fiscalforge
