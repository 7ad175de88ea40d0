#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fiscalforge/fiscalforge.hpp"

using namespace fiscalforge;

namespace {

FinancialSeries fixture() {
    return load_series(std::string(FISCALFORGE_SOURCE_DIR) + "/fixtures/synthetic_quarters.csv").series;
}

std::vector<Transition> random_batch(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Transition> batch(n);
    for (auto& t : batch) {
        t.state = {u(rng), u(rng), u(rng)};
        t.action = sample_uniform_simplex(rng);
        t.reward = -u(rng);
        t.next_state = {u(rng), u(rng), u(rng)};
        t.done = false;
    }
    return batch;
}

}  // namespace

static void BM_DirichletKl(benchmark::State& state) {
    const std::vector<double> a{5.3, 3.1}, b{5.0, 3.0};
    for (auto _ : state) benchmark::DoNotOptimize(dirichlet_kl(a, b));
}
BENCHMARK(BM_DirichletKl);

static void BM_ActorForward(benchmark::State& state) {
    const auto spec = actor_spec({64, 64});
    const auto p = init_params(spec, 1);
    MlpWorkspace ws(spec);
    const std::vector<double> x{0.2, 0.5, 0.7};
    for (auto _ : state) benchmark::DoNotOptimize(ws.forward(p, x).data());
}
BENCHMARK(BM_ActorForward);

static void BM_ActorForwardBackward(benchmark::State& state) {
    const auto spec = actor_spec({64, 64});
    const auto p = init_params(spec, 1);
    MlpWorkspace ws(spec);
    const std::vector<double> x{0.2, 0.5, 0.7}, up{1.0, -1.0};
    std::vector<double> grad(p.size());
    for (auto _ : state) {
        ws.forward(p, x);
        ws.backward(p, up, grad);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_ActorForwardBackward);

static void BM_EnvEpisode(benchmark::State& state) {
    const auto s = fixture();
    BudgetEnv env(s, fit_scaler(s));
    for (auto _ : state) {
        env.reset();
        double total = 0.0;
        while (!env.done()) total += env.step(AllocationAction{}).reward.total;
        benchmark::DoNotOptimize(total);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(env.episode_length()));
}
BENCHMARK(BM_EnvEpisode);

static void BM_CriticUpdate(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), rng);
    const std::vector<double> targets(batch.size(), -0.5);
    const auto spec = critic_spec({64, 64});
    CriticPair critics{{{spec, init_params(spec, 1)}, Optimizer()},
                       {{spec, init_params(spec, 2)}, Optimizer()}};
    for (auto _ : state) benchmark::DoNotOptimize(critic_update(critics, batch, targets, 1e-4));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CriticUpdate)->Arg(64);

static void BM_ActorUpdate(benchmark::State& state) {
    std::mt19937_64 rng(4);
    const auto batch = random_batch(static_cast<std::size_t>(state.range(0)), rng);
    const auto c_spec = critic_spec({64, 64});
    const auto a_spec = actor_spec({64, 64});
    const Network critic{c_spec, init_params(c_spec, 1)};
    TrainableNetwork actor{{a_spec, init_params(a_spec, 2)}, Optimizer()};
    for (auto _ : state) {
        actor_update(actor, critic, batch, 1e-4);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ActorUpdate)->Arg(64);
BENCHMARK_MAIN();
