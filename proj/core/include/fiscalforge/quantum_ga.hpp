#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fiscalforge/checkpoint.hpp"
#include "fiscalforge/environment.hpp"

namespace fiscalforge {

struct Individual {
    ParamVector genome;
    std::optional<double> fitness;
};

struct GaConfig {
    std::size_t generations = 10;
    std::size_t population_size = 5;
    double elite_fraction = 0.4;
    double mutation_rate = 0.1;
    double init_sigma = 0.02;
    double eta = 0.05;            // mutation strength: |delta| <= eta
    double rotation_sigma = 0.3;  // std-dev of the rotation angle
    std::size_t episodes_per_eval = 1;
    std::size_t eval_threads = 1;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t elite_count() const;
};

/// Real-amplitude qubit cos(theta)|0> + sin(theta)|1>.
struct QubitState {
    double amp0 = 1.0;
    double amp1 = 0.0;

    static QubitState from_angle(double theta);
    double norm_squared() const { return amp0 * amp0 + amp1 * amp1; }
};

/// Applies the 2x2 rotation [[cos, -sin], [sin, cos]] by delta_theta.
QubitState rotate_qubit(const QubitState& state, double delta_theta);

struct GenerationLog {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    std::vector<double> fitnesses;
    // Mutation deltas applied while breeding this generation's population.
    std::vector<double> perturbations;

    std::size_t n_mutations() const { return perturbations.size(); }
};

/// Individual 0 is `base`; the rest are base + N(0, init_sigma^2) per gene.
std::vector<Individual> init_population(const ParamVector& base, const GaConfig& config,
                                        std::mt19937_64& rng);

/// Greedy rollout from reset; mean cumulative reward over `episodes`.
double evaluate_fitness(std::span<const double> genome, const MlpSpec& spec, const BudgetEnv& env,
                        std::size_t episodes = 1);

/// Top ceil(fraction * N) by fitness, ties broken by lower index.
std::vector<Individual> select_elites(std::span<const Individual> population,
                                      double elite_fraction);

/// Each gene from parent_a with probability 0.5, else parent_b.
ParamVector uniform_crossover(std::span<const double> parent_a, std::span<const double> parent_b,
                              std::mt19937_64& rng);

struct MutationResult {
    ParamVector genome;
    std::vector<double> perturbations;
};

/// For each gene with probability mutation_rate: rotate |0> by
/// dtheta ~ N(0, rotation_sigma^2) and add eta times the resulting |1>
/// amplitude to the gene.
MutationResult quantum_mutate(ParamVector genome, const GaConfig& config, std::mt19937_64& rng);

struct EvolutionResult {
    Network best;
    double best_fitness = 0.0;
    double base_fitness = 0.0;
    std::vector<GenerationLog> logs;
};

/// Elitist GA over actor genomes. The best individual seen so far is carried
/// unchanged into every generation, so logged best fitness never decreases.
EvolutionResult evolve(const Network& base_policy, const BudgetEnv& env, const GaConfig& config);

}  // namespace fiscalforge
