#include "fiscalforge/td3.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("replay buffer capacity must be positive");
    ring_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(const Transition& t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(t);
    } else {
        ring_[head_] = t;
        head_ = (head_ + 1) % capacity_;
    }
    ++insertions_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= ring_.size()) throw ContractError("replay buffer index out of range");
    return ring_[(head_ + i) % ring_.size()];
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
    if (ring_.empty()) throw SequenceError("cannot sample from an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, ring_.size() - 1);
    std::vector<Transition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(ring_[pick(rng)]);
    return out;
}

void Td3Config::validate() const {
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (total_timesteps == 0 || actor_delay == 0 || batch_size == 0 || buffer_capacity == 0) {
        throw ContractError("td3: total_timesteps, actor_delay, batch_size and buffer_capacity "
                            "must be positive");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ContractError("td3: gamma must lie in [0, 1)");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ContractError("td3: tau must lie in [0, 1]");
    if (!positive(exploration_sigma)) throw ContractError("td3: exploration_sigma must be > 0");
    if (!(target_noise_sigma >= 0.0) || !(target_noise_clip >= 0.0)) {
        throw ContractError("td3: target noise sigma and clip must be >= 0");
    }
    if (!positive(learning_rate)) throw ContractError("td3: learning_rate must be > 0");
    if (actor_hidden.empty() || critic_hidden.empty()) {
        throw ContractError("td3: networks need at least one hidden layer");
    }
}

double compute_target(double reward, double gamma, bool done, double q1_next, double q2_next) {
    if (done) return reward;
    return reward + gamma * std::min(q1_next, q2_next);
}

double clip_noise(double sample, double clip) { return std::clamp(sample, -clip, clip); }

AllocationAction smoothed_target_action(const Network& actor_target, const EnvState& next_state,
                                        double sigma, double clip, std::mt19937_64& rng) {
    const auto base = forward_actor(actor_target.params, actor_target.spec, next_state);
    if (sigma == 0.0) return base;
    std::normal_distribution<double> noise(0.0, sigma);
    std::array<double, kCategories> raw{};
    for (std::size_t j = 0; j < kCategories; ++j) {
        raw[j] = base.weights[j] + clip_noise(noise(rng), clip);
    }
    return project_to_simplex(raw);
}

double critic_update(CriticPair& critics, std::span<const Transition> batch,
                     std::span<const double> targets, double learning_rate) {
    if (batch.empty()) throw ContractError("critic_update: empty batch");
    if (targets.size() != batch.size()) {
        throw ShapeError("critic_update: " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(batch.size()) + " transitions");
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss_sum = 0.0;
    for (auto* critic : {&critics.q1, &critics.q2}) {
        auto& net = critic->net;
        MlpWorkspace ws(net.spec);
        GradientVector grad(net.params.size(), 0.0);
        double loss = 0.0;
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const auto in = critic_input(batch[b].state, batch[b].action);
            const double q = ws.forward(net.params, in)[0];
            const double err = q - targets[b];
            loss += err * err;
            const double upstream = 2.0 * err * inv_n;
            ws.backward(net.params, std::span<const double>(&upstream, 1), grad);
        }
        loss *= inv_n;
        if (!std::isfinite(loss)) throw NumericError("critic_update: loss diverged");
        critic->optimizer.step(net.params, grad, learning_rate);
        loss_sum += loss;
    }
    return 0.5 * loss_sum;
}

GradientVector actor_objective_gradient(const Network& actor, const Network& critic1,
                                        std::span<const Transition> batch) {
    if (batch.empty()) throw ContractError("actor objective: empty batch");
    MlpWorkspace actor_ws(actor.spec);
    MlpWorkspace critic_ws(critic1.spec);
    GradientVector grad(actor.params.size(), 0.0);
    GradientVector critic_scratch(critic1.params.size(), 0.0);
    std::vector<double> critic_in_grad(critic1.spec.input_dim, 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    for (const auto& tr : batch) {
        const auto s = tr.state.as_array();
        const auto out = actor_ws.forward(actor.params, s);
        AllocationAction a;
        std::copy(out.begin(), out.end(), a.weights.begin());
        const auto in = critic_input(tr.state, a);
        critic_ws.forward(critic1.params, in);
        critic_ws.backward(critic1.params, std::span<const double>(&inv_n, 1), critic_scratch,
                           critic_in_grad);
        const std::span<const double> dq_da(critic_in_grad.data() + kStateDim, kCategories);
        actor_ws.backward(actor.params, dq_da, grad);
    }
    for (double g : grad) {
        if (!std::isfinite(g)) throw NumericError("actor objective: non-finite gradient");
    }
    return grad;
}

void actor_update(TrainableNetwork& actor, const Network& critic1,
                  std::span<const Transition> batch, double learning_rate) {
    auto grad = actor_objective_gradient(actor.net, critic1, batch);
    for (auto& g : grad) g = -g;  // ascent
    actor.optimizer.step(actor.net.params, grad, learning_rate);
}

void soft_update(ParamVector& target, std::span<const double> online, double tau) {
    if (target.size() != online.size()) {
        throw ShapeError("soft_update: target has " + std::to_string(target.size()) +
                         " parameters, online has " + std::to_string(online.size()));
    }
    for (std::size_t i = 0; i < target.size(); ++i) {
        target[i] = (1.0 - tau) * target[i] + tau * online[i];
    }
}

AllocationAction sample_uniform_simplex(std::mt19937_64& rng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::array<double, kCategories> raw{};
    double sum = 0.0;
    for (auto& v : raw) {
        v = g(rng);
        sum += v;
    }
    AllocationAction a;
    if (sum <= 0.0) return a;
    for (std::size_t j = 0; j < kCategories; ++j) a.weights[j] = raw[j] / sum;
    return a;
}

TrainingResult train(BudgetEnv env, const Td3Config& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    const auto a_spec = actor_spec(config.actor_hidden);
    const auto c_spec = critic_spec(config.critic_hidden);
    TrainableNetwork actor{{a_spec, init_params(a_spec, rng())}, Optimizer(config.optimizer)};
    CriticPair critics{{{c_spec, init_params(c_spec, rng())}, Optimizer(config.optimizer)},
                       {{c_spec, init_params(c_spec, rng())}, Optimizer(config.optimizer)}};
    Network actor_target = actor.net;
    Network q1_target = critics.q1.net;
    Network q2_target = critics.q2.net;

    ReplayBuffer buffer(config.buffer_capacity);
    std::normal_distribution<double> explore(0.0, config.exploration_sigma);
    MlpWorkspace q1t_ws(c_spec);
    MlpWorkspace q2t_ws(c_spec);

    TrainingResult result;
    std::vector<double>& history = result.policy.episode_rewards;

    EnvState state = env.reset();
    double episode_reward = 0.0;
    std::vector<double> targets(config.batch_size);

    for (std::size_t step = 0; step < config.total_timesteps; ++step) {
        AllocationAction action;
        if (step < config.warmup_steps) {
            action = sample_uniform_simplex(rng);
        } else {
            const auto greedy = forward_actor(actor.net.params, actor.net.spec, state);
            std::array<double, kCategories> raw{};
            for (std::size_t j = 0; j < kCategories; ++j) raw[j] = greedy.weights[j] + explore(rng);
            action = project_to_simplex(raw);
        }

        const auto res = env.step(action);
        buffer.push(Transition{state, action, res.reward.total, res.next_state, res.done});
        episode_reward += res.reward.total;
        if (res.done) {
            history.push_back(episode_reward);
            episode_reward = 0.0;
            state = env.reset();
        } else {
            state = res.next_state;
        }

        if (step < config.warmup_steps || buffer.size() < config.batch_size) continue;

        const auto batch = buffer.sample(config.batch_size, rng);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const auto& tr = batch[b];
            double q1n = 0.0;
            double q2n = 0.0;
            if (!tr.done) {
                const auto next_a =
                    smoothed_target_action(actor_target, tr.next_state, config.target_noise_sigma,
                                           config.target_noise_clip, rng);
                const auto in = critic_input(tr.next_state, next_a);
                q1n = q1t_ws.forward(q1_target.params, in)[0];
                q2n = q2t_ws.forward(q2_target.params, in)[0];
            }
            targets[b] = compute_target(tr.reward, config.gamma, tr.done, q1n, q2n);
        }
        critic_update(critics, batch, targets, config.learning_rate);
        ++result.critic_updates;

        if (result.critic_updates % config.actor_delay == 0) {
            actor_update(actor, critics.q1.net, batch, config.learning_rate);
            ++result.actor_updates;
            soft_update(actor_target.params, actor.net.params, config.tau);
            soft_update(q1_target.params, critics.q1.net.params, config.tau);
            soft_update(q2_target.params, critics.q2.net.params, config.tau);
        }
    }

    result.policy.actor = std::move(actor.net);
    result.policy.seed = config.seed;
    result.policy.config = config;
    result.critic1 = std::move(critics.q1.net);
    result.critic2 = std::move(critics.q2.net);
    result.actor_target = std::move(actor_target);
    result.critic1_target = std::move(q1_target);
    result.critic2_target = std::move(q2_target);
    return result;
}

}  // namespace fiscalforge
