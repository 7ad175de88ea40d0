#include "fiscalforge/quantum_ga.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

#include "fiscalforge/errors.hpp"

namespace fiscalforge {

void GaConfig::validate() const {
    if (population_size == 0) throw ContractError("ga: population_size must be positive");
    if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) {
        throw ContractError("ga: elite_fraction must lie in (0, 1]");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw ContractError("ga: mutation_rate must lie in [0, 1]");
    }
    if (!(init_sigma >= 0.0) || !(eta >= 0.0) || !(rotation_sigma >= 0.0)) {
        throw ContractError("ga: init_sigma, eta and rotation_sigma must be >= 0");
    }
    if (episodes_per_eval == 0) throw ContractError("ga: episodes_per_eval must be positive");
    if (elite_count() < 1) throw ContractError("ga: elite set would be empty");
}

std::size_t GaConfig::elite_count() const {
    const double k = std::ceil(elite_fraction * static_cast<double>(population_size) - 1e-12);
    return std::min(population_size, static_cast<std::size_t>(std::max(k, 0.0)));
}

QubitState QubitState::from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

QubitState rotate_qubit(const QubitState& state, double delta_theta) {
    const double c = std::cos(delta_theta);
    const double s = std::sin(delta_theta);
    return {c * state.amp0 - s * state.amp1, s * state.amp0 + c * state.amp1};
}

std::vector<Individual> init_population(const ParamVector& base, const GaConfig& config,
                                        std::mt19937_64& rng) {
    config.validate();
    std::vector<Individual> pop;
    pop.reserve(config.population_size);
    pop.push_back(Individual{base, std::nullopt});
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 1; i < config.population_size; ++i) {
        ParamVector g = base;
        for (auto& v : g) v += config.init_sigma * noise(rng);
        pop.push_back(Individual{std::move(g), std::nullopt});
    }
    return pop;
}

double evaluate_fitness(std::span<const double> genome, const MlpSpec& spec, const BudgetEnv& env,
                        std::size_t episodes) {
    if (genome.size() != spec.param_count()) {
        throw ShapeError("evaluate_fitness: genome length " + std::to_string(genome.size()) +
                         " does not match the actor spec (" + std::to_string(spec.param_count()) +
                         ")");
    }
    if (episodes == 0) throw ContractError("evaluate_fitness: episodes must be positive");
    BudgetEnv local = env;
    local.set_trace(nullptr);
    MlpWorkspace ws(spec);
    double total = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
        auto state = local.reset();
        bool done = false;
        while (!done) {
            const auto s = state.as_array();
            const auto out = ws.forward(genome, s);
            AllocationAction a;
            std::copy(out.begin(), out.end(), a.weights.begin());
            const auto res = local.step(a);
            total += res.reward.total;
            state = res.next_state;
            done = res.done;
        }
    }
    if (!std::isfinite(total)) throw NumericError("evaluate_fitness: non-finite reward");
    return total / static_cast<double>(episodes);
}

std::vector<Individual> select_elites(std::span<const Individual> population,
                                      double elite_fraction) {
    if (population.empty()) throw ContractError("select_elites: empty population");
    if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) {
        throw ContractError("select_elites: elite_fraction must lie in (0, 1]");
    }
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (!population[i].fitness) {
            throw ContractError("select_elites: individual " + std::to_string(i) +
                                " has not been evaluated");
        }
    }
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *population[a].fitness > *population[b].fitness;
    });
    const double k_real = std::ceil(elite_fraction * static_cast<double>(population.size()) - 1e-12);
    const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(k_real), 1, population.size());
    std::vector<Individual> elites;
    elites.reserve(k);
    for (std::size_t i = 0; i < k; ++i) elites.push_back(population[order[i]]);
    return elites;
}

ParamVector uniform_crossover(std::span<const double> parent_a, std::span<const double> parent_b,
                              std::mt19937_64& rng) {
    if (parent_a.size() != parent_b.size()) {
        throw ShapeError("uniform_crossover: parents have lengths " +
                         std::to_string(parent_a.size()) + " and " +
                         std::to_string(parent_b.size()));
    }
    std::bernoulli_distribution from_a(0.5);
    ParamVector child(parent_a.size());
    for (std::size_t j = 0; j < child.size(); ++j) child[j] = from_a(rng) ? parent_a[j] : parent_b[j];
    return child;
}

MutationResult quantum_mutate(ParamVector genome, const GaConfig& config, std::mt19937_64& rng) {
    MutationResult out;
    out.genome = std::move(genome);
    if (config.mutation_rate <= 0.0) return out;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> angle(0.0, config.rotation_sigma);
    const QubitState ground{};
    for (auto& gene : out.genome) {
        if (coin(rng) >= config.mutation_rate) continue;
        const auto rotated = rotate_qubit(ground, angle(rng));
        const double delta = config.eta * rotated.amp1;
        gene += delta;
        out.perturbations.push_back(delta);
    }
    return out;
}

namespace {

void evaluate_population(std::vector<Individual>& pop, const MlpSpec& spec, const BudgetEnv& env,
                         const GaConfig& config) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!pop[i].fitness) pending.push_back(i);
    }
    if (config.eval_threads <= 1 || pending.size() <= 1) {
        for (auto i : pending) {
            pop[i].fitness = evaluate_fitness(pop[i].genome, spec, env, config.episodes_per_eval);
        }
        return;
    }
    // Each worker takes every eval_threads-th pending individual; results land
    // in fixed slots, so the outcome matches the sequential path exactly.
    const auto workers = std::min(config.eval_threads, pending.size());
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t k = w; k < pending.size(); k += workers) {
                auto& ind = pop[pending[k]];
                ind.fitness = evaluate_fitness(ind.genome, spec, env, config.episodes_per_eval);
            }
        }));
    }
    for (auto& j : jobs) j.get();
}

}  // namespace

EvolutionResult evolve(const Network& base_policy, const BudgetEnv& env, const GaConfig& config) {
    config.validate();
    const auto& spec = base_policy.spec;
    if (base_policy.params.size() != spec.param_count()) {
        throw ShapeError("evolve: base policy parameters do not match its spec");
    }

    EvolutionResult result;
    result.best = base_policy;
    result.base_fitness =
        evaluate_fitness(base_policy.params, spec, env, config.episodes_per_eval);
    result.best_fitness = result.base_fitness;
    if (config.generations == 0) return result;

    std::mt19937_64 rng(config.seed);
    auto population = init_population(base_policy.params, config, rng);
    population[0].fitness = result.base_fitness;

    Individual hall_of_fame{base_policy.params, result.base_fitness};
    std::vector<double> bred_perturbations;

    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        evaluate_population(population, spec, env, config);

        GenerationLog log;
        log.generation = gen;
        log.perturbations = std::move(bred_perturbations);
        bred_perturbations.clear();
        for (const auto& ind : population) log.fitnesses.push_back(*ind.fitness);
        log.best = *std::max_element(log.fitnesses.begin(), log.fitnesses.end());
        log.mean = std::accumulate(log.fitnesses.begin(), log.fitnesses.end(), 0.0) /
                   static_cast<double>(log.fitnesses.size());

        // Strict improvement only, so earlier (lower-index) winners keep the slot.
        for (const auto& ind : population) {
            if (*ind.fitness > *hall_of_fame.fitness) hall_of_fame = ind;
        }
        result.logs.push_back(std::move(log));

        if (gen + 1 == config.generations) break;

        const auto elites = select_elites(population, config.elite_fraction);
        std::uniform_int_distribution<std::size_t> pick(0, elites.size() - 1);
        std::vector<Individual> next;
        next.reserve(config.population_size);
        next.push_back(hall_of_fame);
        while (next.size() < config.population_size) {
            const auto& a = elites[pick(rng)];
            const auto& b = elites[pick(rng)];
            auto child = uniform_crossover(a.genome, b.genome, rng);
            auto mutated = quantum_mutate(std::move(child), config, rng);
            bred_perturbations.insert(bred_perturbations.end(), mutated.perturbations.begin(),
                                      mutated.perturbations.end());
            next.push_back(Individual{std::move(mutated.genome), std::nullopt});
        }
        population = std::move(next);
    }

    result.best = Network{spec, hall_of_fame.genome};
    result.best_fitness = *hall_of_fame.fitness;
    return result;
}

}  // namespace fiscalforge
