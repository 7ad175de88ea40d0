#include "fiscalforge/neural.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

std::size_t MlpSpec::layer_input(std::size_t layer) const {
    return layer == 0 ? input_dim : hidden_dims[layer - 1];
}

std::size_t MlpSpec::layer_output(std::size_t layer) const {
    return layer < hidden_dims.size() ? hidden_dims[layer] : output_dim;
}

std::size_t MlpSpec::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) {
        n += layer_output(l) * layer_input(l) + layer_output(l);
    }
    return n;
}

void MlpSpec::validate() const {
    if (input_dim == 0 || output_dim == 0) {
        throw ContractError("MlpSpec: input and output dimensions must be positive");
    }
    if (hidden_dims.empty()) {
        throw ContractError("MlpSpec: at least one hidden layer is required");
    }
    if (std::find(hidden_dims.begin(), hidden_dims.end(), 0u) != hidden_dims.end()) {
        throw ContractError("MlpSpec: hidden layer widths must be positive");
    }
    if (head != OutputHead::simplex && head != OutputHead::linear) {
        throw ContractError("MlpSpec: unknown output head");
    }
}

MlpSpec actor_spec(std::vector<std::size_t> hidden) {
    return MlpSpec{kStateDim, std::move(hidden), kCategories, OutputHead::simplex};
}

MlpSpec critic_spec(std::vector<std::size_t> hidden) {
    return MlpSpec{kStateDim + kCategories, std::move(hidden), 1, OutputHead::linear};
}

std::vector<DenseLayer> unflatten(std::span<const double> params, const MlpSpec& spec) {
    spec.validate();
    if (params.size() != spec.param_count()) {
        throw ShapeError("unflatten: got " + std::to_string(params.size()) +
                         " parameters, spec needs " + std::to_string(spec.param_count()));
    }
    std::vector<DenseLayer> layers;
    std::size_t pos = 0;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        DenseLayer layer;
        layer.in = spec.layer_input(l);
        layer.out = spec.layer_output(l);
        const auto nw = layer.in * layer.out;
        layer.weights.assign(params.begin() + pos, params.begin() + pos + nw);
        pos += nw;
        layer.bias.assign(params.begin() + pos, params.begin() + pos + layer.out);
        pos += layer.out;
        layers.push_back(std::move(layer));
    }
    return layers;
}

ParamVector flatten(std::span<const DenseLayer> layers) {
    ParamVector out;
    for (const auto& layer : layers) {
        if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
            throw ShapeError("flatten: layer buffers do not match their declared shape");
        }
        out.insert(out.end(), layer.weights.begin(), layer.weights.end());
        out.insert(out.end(), layer.bias.begin(), layer.bias.end());
    }
    return out;
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    ParamVector params;
    params.reserve(spec.param_count());
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const auto in = spec.layer_input(l);
        const auto out = spec.layer_output(l);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t k = 0; k < in * out; ++k) params.push_back(dist(rng));
        params.insert(params.end(), out, 0.0);
    }
    return params;
}

MlpWorkspace::MlpWorkspace(MlpSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::size_t pos = 0;
    acts_.emplace_back(spec_.input_dim);
    std::size_t widest = spec_.input_dim;
    for (std::size_t l = 0; l < spec_.layer_count(); ++l) {
        offsets_.push_back(pos);
        pos += spec_.layer_input(l) * spec_.layer_output(l) + spec_.layer_output(l);
        acts_.emplace_back(spec_.layer_output(l));
        widest = std::max(widest, spec_.layer_output(l));
    }
    delta_.resize(widest);
    next_delta_.resize(widest);
}

std::span<const double> MlpWorkspace::forward(std::span<const double> params,
                                              std::span<const double> input) {
    if (params.size() != spec_.param_count()) {
        throw ShapeError("forward: got " + std::to_string(params.size()) +
                         " parameters, spec needs " + std::to_string(spec_.param_count()));
    }
    if (input.size() != spec_.input_dim) {
        throw ShapeError("forward: input has " + std::to_string(input.size()) +
                         " features, spec needs " + std::to_string(spec_.input_dim));
    }
    std::copy(input.begin(), input.end(), acts_[0].begin());
    const std::size_t last = spec_.layer_count() - 1;
    for (std::size_t l = 0; l <= last; ++l) {
        const auto in = spec_.layer_input(l);
        const auto out = spec_.layer_output(l);
        const double* w = params.data() + offsets_[l];
        const double* b = w + in * out;
        const auto& x = acts_[l];
        auto& y = acts_[l + 1];
        for (std::size_t o = 0; o < out; ++o) {
            double z = b[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) z += row[i] * x[i];
            y[o] = z;
        }
        if (l < last) {
            for (auto& v : y) v = std::tanh(v);
        } else if (spec_.head == OutputHead::simplex) {
            const double peak = *std::max_element(y.begin(), y.end());
            double sum = 0.0;
            for (auto& v : y) {
                v = std::exp(v - peak);
                sum += v;
            }
            for (auto& v : y) v /= sum;
        }
    }
    return acts_.back();
}

void MlpWorkspace::backward(std::span<const double> params, std::span<const double> upstream,
                            std::span<double> param_grad, std::span<double> input_grad) {
    if (upstream.size() != spec_.output_dim) {
        throw ShapeError("backward: upstream gradient has " + std::to_string(upstream.size()) +
                         " entries, network has " + std::to_string(spec_.output_dim) + " outputs");
    }
    if (param_grad.size() != spec_.param_count()) {
        throw ShapeError("backward: gradient buffer length does not match the spec");
    }
    if (!input_grad.empty() && input_grad.size() != spec_.input_dim) {
        throw ShapeError("backward: input gradient buffer length does not match the spec");
    }

    const std::size_t last = spec_.layer_count() - 1;
    const auto& y = acts_.back();
    if (spec_.head == OutputHead::simplex) {
        // Softmax Jacobian: dz_k = y_k (g_k - <g, y>)
        double dot = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) dot += upstream[k] * y[k];
        for (std::size_t k = 0; k < y.size(); ++k) delta_[k] = y[k] * (upstream[k] - dot);
    } else {
        std::copy(upstream.begin(), upstream.end(), delta_.begin());
    }

    for (std::size_t l = last + 1; l-- > 0;) {
        const auto in = spec_.layer_input(l);
        const auto out = spec_.layer_output(l);
        const double* w = params.data() + offsets_[l];
        double* gw = param_grad.data() + offsets_[l];
        double* gb = gw + in * out;
        const auto& x = acts_[l];
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta_[o];
            double* grow = gw + o * in;
            for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
            gb[o] += d;
        }
        if (l == 0 && input_grad.empty()) break;
        std::fill(next_delta_.begin(), next_delta_.begin() + in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            const double d = delta_[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) next_delta_[i] += row[i] * d;
        }
        if (l == 0) {
            std::copy(next_delta_.begin(), next_delta_.begin() + in, input_grad.begin());
        } else {
            for (std::size_t i = 0; i < in; ++i) next_delta_[i] *= 1.0 - x[i] * x[i];
            std::swap(delta_, next_delta_);
        }
    }
}

std::vector<double> forward(std::span<const double> params, const MlpSpec& spec,
                            std::span<const double> input) {
    MlpWorkspace ws(spec);
    const auto out = ws.forward(params, input);
    return {out.begin(), out.end()};
}

Backprop backward(std::span<const double> params, const MlpSpec& spec,
                  std::span<const double> input, std::span<const double> upstream_grad) {
    MlpWorkspace ws(spec);
    ws.forward(params, input);
    Backprop bp{GradientVector(spec.param_count(), 0.0), std::vector<double>(spec.input_dim, 0.0)};
    ws.backward(params, upstream_grad, bp.params, bp.input);
    return bp;
}

AllocationAction forward_actor(std::span<const double> params, const MlpSpec& spec,
                               const EnvState& state) {
    if (spec.head != OutputHead::simplex || spec.output_dim != kCategories ||
        spec.input_dim != kStateDim) {
        throw ContractError("forward_actor: spec must map 3 state features to a 2-way simplex head");
    }
    const auto in = state.as_array();
    const auto out = forward(params, spec, in);
    AllocationAction a;
    for (std::size_t j = 0; j < kCategories; ++j) {
        if (!std::isfinite(out[j])) throw NumericError("forward_actor: non-finite output");
        a.weights[j] = out[j];
    }
    return a;
}

std::array<double, kStateDim + kCategories> critic_input(const EnvState& state,
                                                         const AllocationAction& action) {
    return {state.rnd, state.sga, state.net_income, action.weights[0], action.weights[1]};
}

double forward_critic(std::span<const double> params, const MlpSpec& spec, const EnvState& state,
                      const AllocationAction& action) {
    if (spec.head != OutputHead::linear || spec.output_dim != 1 ||
        spec.input_dim != kStateDim + kCategories) {
        throw ContractError("forward_critic: spec must map 5 inputs to one linear output");
    }
    const auto in = critic_input(state, action);
    const double q = forward(params, spec, in)[0];
    if (!std::isfinite(q)) throw NumericError("forward_critic: non-finite output");
    return q;
}

}  // namespace fiscalforge
