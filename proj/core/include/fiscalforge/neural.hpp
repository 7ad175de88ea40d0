#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fiscalforge/environment.hpp"

namespace fiscalforge {

enum class OutputHead : std::uint32_t {
    simplex = 0,  // softmax over the output logits
    linear = 1,
};

/// Fully connected tanh network shape.
struct MlpSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 0;
    OutputHead head = OutputHead::linear;

    std::size_t layer_count() const { return hidden_dims.size() + 1; }
    std::size_t layer_input(std::size_t layer) const;
    std::size_t layer_output(std::size_t layer) const;
    std::size_t param_count() const;
    void validate() const;

    bool operator==(const MlpSpec&) const = default;
};

MlpSpec actor_spec(std::vector<std::size_t> hidden = {64, 64});
MlpSpec critic_spec(std::vector<std::size_t> hidden = {64, 64});

// Flat parameter layout: for each layer in order, the out x in weight matrix
// (row-major, one row per output unit) followed by the out biases.
using ParamVector = std::vector<double>;
using GradientVector = std::vector<double>;

/// Logical view of one layer.
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;  // out x in, row-major
    std::vector<double> bias;

    double& weight(std::size_t o, std::size_t i) { return weights[o * in + i]; }
    double weight(std::size_t o, std::size_t i) const { return weights[o * in + i]; }
    bool operator==(const DenseLayer&) const = default;
};

std::vector<DenseLayer> unflatten(std::span<const double> params, const MlpSpec& spec);
ParamVector flatten(std::span<const DenseLayer> layers);

/// Glorot-uniform weights, zero biases. Deterministic in `seed`.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed);

struct Backprop {
    GradientVector params;       // d(upstream . output) / d params
    std::vector<double> input;   // d(upstream . output) / d input
};

/// Reusable forward/backward scratch space for one spec. Not thread-safe;
/// keep one per thread.
class MlpWorkspace {
public:
    explicit MlpWorkspace(MlpSpec spec);

    const MlpSpec& spec() const { return spec_; }

    /// Runs the network and caches activations for a following backward().
    std::span<const double> forward(std::span<const double> params, std::span<const double> input);

    /// Backpropagates `upstream` (gradient w.r.t. the head output) through the
    /// most recent forward(). Adds the parameter gradient into `param_grad`
    /// and, when non-empty, overwrites `input_grad`.
    void backward(std::span<const double> params, std::span<const double> upstream,
                  std::span<double> param_grad, std::span<double> input_grad = {});

private:
    MlpSpec spec_;
    std::vector<std::size_t> offsets_;          // start of each layer's weights
    std::vector<std::vector<double>> acts_;     // acts_[0] = input, acts_[l+1] = layer l output
    std::vector<double> delta_;
    std::vector<double> next_delta_;
};

std::vector<double> forward(std::span<const double> params, const MlpSpec& spec,
                            std::span<const double> input);
Backprop backward(std::span<const double> params, const MlpSpec& spec,
                  std::span<const double> input, std::span<const double> upstream_grad);

AllocationAction forward_actor(std::span<const double> params, const MlpSpec& spec,
                               const EnvState& state);
double forward_critic(std::span<const double> params, const MlpSpec& spec, const EnvState& state,
                      const AllocationAction& action);

/// Critic input layout: [rnd, sga, net_income, a_rnd, a_sga].
std::array<double, kStateDim + kCategories> critic_input(const EnvState& state,
                                                         const AllocationAction& action);

}  // namespace fiscalforge
