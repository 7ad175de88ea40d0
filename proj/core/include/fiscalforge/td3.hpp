#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fiscalforge/checkpoint.hpp"
#include "fiscalforge/environment.hpp"
#include "fiscalforge/neural.hpp"
#include "fiscalforge/optimizer.hpp"

namespace fiscalforge {

struct Transition {
    EnvState state;
    AllocationAction action;
    double reward = 0.0;
    EnvState next_state;
    bool done = false;
};

/// Fixed-capacity ring of transitions; the oldest is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t insertions() const { return insertions_; }

    /// i-th transition counting from the oldest still held.
    const Transition& at(std::size_t i) const;

    /// Uniform sample with replacement.
    std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::vector<Transition> ring_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::uint64_t insertions_ = 0;
};

struct Td3Config {
    std::size_t total_timesteps = 50'000;
    double gamma = 0.99;
    double tau = 0.005;
    std::size_t actor_delay = 2;
    std::size_t batch_size = 64;
    std::size_t buffer_capacity = 10'000;
    double exploration_sigma = 0.1;
    double target_noise_sigma = 0.2;
    double target_noise_clip = 0.5;
    double learning_rate = 1e-3;
    std::size_t warmup_steps = 500;
    std::vector<std::size_t> actor_hidden{64, 64};
    std::vector<std::size_t> critic_hidden{64, 64};
    OptimizerKind optimizer = OptimizerKind::adam;
    std::uint64_t seed = 0;

    void validate() const;
};

/// A network plus the optimizer state that trains it.
struct TrainableNetwork {
    Network net;
    Optimizer optimizer;
};

struct CriticPair {
    TrainableNetwork q1;
    TrainableNetwork q2;
};

/// y = r if done, else r + gamma * min(q1_next, q2_next).
double compute_target(double reward, double gamma, bool done, double q1_next, double q2_next);

/// Target-actor action plus clipped Gaussian noise, projected to the simplex.
AllocationAction smoothed_target_action(const Network& actor_target, const EnvState& next_state,
                                        double sigma, double clip, std::mt19937_64& rng);

/// Clamp applied to each target-policy noise sample before it is added.
double clip_noise(double sample, double clip);

/// One descent step on mean (Q(s,a) - y)^2 for each critic. Returns the mean
/// of the two pre-step losses.
double critic_update(CriticPair& critics, std::span<const Transition> batch,
                     std::span<const double> targets, double learning_rate);

/// Gradient of mean_b Q1(s_b, pi(s_b)) with respect to the actor parameters.
GradientVector actor_objective_gradient(const Network& actor, const Network& critic1,
                                        std::span<const Transition> batch);

/// One ascent step on mean Q1(s, pi(s)) over the batch.
void actor_update(TrainableNetwork& actor, const Network& critic1,
                  std::span<const Transition> batch, double learning_rate);

/// target <- (1 - tau) target + tau online
void soft_update(ParamVector& target, std::span<const double> online, double tau);

struct TrainedPolicy {
    Network actor;
    std::uint64_t seed = 0;
    Td3Config config;
    std::vector<double> episode_rewards;  // cumulative reward per completed episode
};

struct TrainingResult {
    TrainedPolicy policy;
    Network critic1;
    Network critic2;
    Network actor_target;
    Network critic1_target;
    Network critic2_target;
    std::size_t critic_updates = 0;
    std::size_t actor_updates = 0;
};

/// Runs TD3 for config.total_timesteps environment steps, restarting
/// episodes as they end. Deterministic in (env data, config).
TrainingResult train(BudgetEnv env, const Td3Config& config);

/// Dirichlet(1, ..., 1) draw, i.e. uniform on the simplex.
AllocationAction sample_uniform_simplex(std::mt19937_64& rng);

}  // namespace fiscalforge
