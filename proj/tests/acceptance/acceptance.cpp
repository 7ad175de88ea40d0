// Acceptance report: one PASS/FAIL line per criterion. Criterion 9 is
// informational and never affects the exit status.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "fiscalforge/fiscalforge.hpp"
#include "test_support.hpp"

using namespace fiscalforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

// Collects failed checks for one criterion.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        ++total_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    Outcome outcome(std::string summary) const {
        if (failed_ == 0) return {Status::pass, summary};
        std::string d = std::to_string(failed_) + "/" + std::to_string(total_) + " checks failed";
        for (const auto& f : failures_) d += "; " + f;
        return {Status::fail, d};
    }

private:
    std::size_t total_ = 0;
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
};

std::string num(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

cli::RunConfig fixture_config() {
    return cli::load_run_config(testing::source_dir() / "configs" / "fixture.json");
}

// ---------------------------------------------------------------------------

Outcome special_functions() {
    Checks c;
    constexpr double kEuler = 0.57721566490153286061;
    c.expect(near(ln_gamma(5.0), std::log(24.0), 1e-9), "lnGamma(5) = ln 24");
    c.expect(near(ln_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-9), "lnGamma(1/2)");
    c.expect(near(digamma(1.0), -kEuler, 1e-9), "psi(1) = -gamma");
    c.expect(near(digamma(0.5), -kEuler - 2.0 * std::log(2.0), 1e-9), "psi(1/2)");
    for (double x = 0.01; x < 1e4; x *= 1.37) {
        c.expect(near(ln_gamma(x + 1.0) - ln_gamma(x), std::log(x), 1e-9 * std::max(1.0, std::abs(ln_gamma(x)))),
                 "lnGamma recurrence at " + num(x));
        c.expect(near(digamma(x + 1.0) - digamma(x), 1.0 / x, 1e-9 * std::max(1.0, 1.0 / x)),
                 "psi recurrence at " + num(x));
    }
    const std::vector<double> a{2.0, 1.0}, b{1.0, 1.0};
    const double kl = dirichlet_kl(a, b);
    c.expect(near(kl, std::log(2.0) - 0.5, 1e-9), "KL(Dir[2,1] || Dir[1,1]) = ln2 - 1/2");

    // Monte-Carlo: E_p[ln p(x) - ln q(x)] with x ~ Beta(2, 1), q uniform.
    std::mt19937_64 rng(2024);
    std::gamma_distribution<double> g2(2.0, 1.0), g1(1.0, 1.0);
    const double log_norm_p = ln_gamma(3.0) - ln_gamma(2.0) - ln_gamma(1.0);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) {
        const double y1 = g2(rng), y2 = g1(rng);
        const double x = y1 / (y1 + y2);
        sum += log_norm_p + std::log(x);
    }
    const double mc = sum / n;
    c.expect(near(kl, mc, 3e-3), "Monte-Carlo KL " + num(mc));
    return c.outcome("KL " + num(kl, 10) + ", Monte-Carlo " + num(mc));
}

Outcome gradients() {
    Checks c;
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<std::size_t> width(1, 8);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (auto head : {OutputHead::linear, OutputHead::simplex}) {
        for (int probe = 0; probe < 100; ++probe) {
            MlpSpec spec{width(rng), {width(rng), width(rng)}, 1 + width(rng) % 3, head};
            if (head == OutputHead::simplex) spec.output_dim += 1;
            auto p = init_params(spec, rng());
            std::vector<double> x(spec.input_dim), up(spec.output_dim);
            for (auto& v : x) v = normal(rng);
            for (auto& v : up) v = normal(rng);
            const auto bp = backward(p, spec, x, up);
            const auto f = [&](const std::vector<double>& params) {
                const auto y = forward(params, spec, x);
                return std::inner_product(y.begin(), y.end(), up.begin(), 0.0);
            };
            const double h = 1e-5;
            double diff2 = 0.0, norm_a = 0.0, norm_b = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double orig = p[i];
                p[i] = orig + h;
                const double hi = f(p);
                p[i] = orig - h;
                const double lo = f(p);
                p[i] = orig;
                const double fd = (hi - lo) / (2.0 * h);
                diff2 += (fd - bp.params[i]) * (fd - bp.params[i]);
                norm_a += fd * fd;
                norm_b += bp.params[i] * bp.params[i];
            }
            const double denom = std::sqrt(norm_a) + std::sqrt(norm_b);
            const double rel = denom < 1e-12 ? std::sqrt(diff2) : std::sqrt(diff2) / denom;
            worst = std::max(worst, rel);
            c.expect(rel <= 1e-4, std::string(head == OutputHead::linear ? "linear" : "simplex") +
                                      " probe " + std::to_string(probe) + " rel " + num(rel));
        }
    }
    return c.outcome("200 probes, worst relative error " + num(worst, 3));
}

Outcome environment_algebra() {
    Checks c;
    const auto series = testing::fixture_series();
    const auto scaler = fit_scaler(series);
    BudgetEnv env(series, scaler, EnvConfig{0.1, 0.01, 1.0, {5.0, 3.0}});
    c.expect(env.episode_length() == series.size() - 1, "episode length = series - 1");

    std::mt19937_64 rng(5);
    for (int episode = 0; episode < 50; ++episode) {
        env.reset();
        double total = env.belief().total();
        std::size_t steps = 0;
        while (!env.done()) {
            const auto r = env.step(sample_uniform_simplex(rng));
            ++steps;
            c.expect(near(env.belief().total(), total + 1.0, 1e-12), "belief grows by c");
            total = env.belief().total();
            c.expect(r.reward.total <= 0.0, "reward <= 0");
        }
        c.expect(steps == series.size() - 1, "steps per episode");
    }

    const auto s = testing::make_series({{1, 3, 0}, {2, 2, 1}, {1, 2, 2}});
    BudgetEnv zero_env(s, fit_scaler(s), EnvConfig{0.1, 0.01, 0.0, {5.0, 3.0}});
    zero_env.reset();
    c.expect(zero_env.step(AllocationAction{{0.5, 0.5}}).reward.total == 0.0,
             "triple coincidence gives zero reward");

    const auto oracle =
        testing::read_numeric_csv(testing::source_dir() / "tests/fixtures/reward_trace_oracle.csv");
    env.reset();
    double worst = 0.0;
    for (const auto& row : oracle) {
        const auto r = env.step(AllocationAction{{row[1], row[2]}});
        const std::vector<double> got{r.info.empirical.weights[0], r.info.empirical.weights[1],
                                      r.reward.accuracy_term,       r.reward.smoothness_term,
                                      r.reward.belief_term,         r.reward.total,
                                      env.belief().values()[0],     env.belief().values()[1]};
        for (std::size_t k = 0; k < got.size(); ++k) worst = std::max(worst, std::abs(got[k] - row[3 + k]));
    }
    c.expect(oracle.size() == series.size() - 1, "oracle trace covers the episode");
    c.expect(worst <= 1e-9, "trace deviation " + num(worst));
    return c.outcome("reward trace max deviation " + num(worst, 3));
}

struct TrainedFixture {
    TrainingResult result;
    cli::RunConfig config;
};

std::optional<TrainedFixture> g_trained;

const TrainedFixture& trained_fixture() {
    if (!g_trained) {
        auto cfg = fixture_config();
        cfg.td3 = Td3Config{};
        cfg.td3.total_timesteps = 10'000;
        cfg.propagate_seeds();
        const auto split = chrono_split(load_series(cfg.data_path).series, cfg.train_fraction);
        BudgetEnv env(split.train, fit_scaler(split.train), cfg.environment);
        g_trained = TrainedFixture{train(env, cfg.td3), cfg};
    }
    return *g_trained;
}

Outcome td3_progress() {
    Checks c;
    const auto& t = trained_fixture();
    const auto& rewards = t.result.policy.episode_rewards;
    if (rewards.size() < 10) return {Status::fail, "fewer than 10 episodes"};
    const double first = std::accumulate(rewards.begin(), rewards.begin() + 5, 0.0) / 5.0;
    const double last = std::accumulate(rewards.end() - 5, rewards.end(), 0.0) / 5.0;
    c.expect(last > first, "last-5 mean " + num(last) + " vs first-5 " + num(first));

    const auto split = chrono_split(load_series(t.config.data_path).series, t.config.train_fraction);
    const auto scaler = fit_scaler(split.train);
    const auto trained =
        evaluate_policy(actor_policy(t.result.policy.actor), split.test, scaler, t.config.environment);
    const auto uniform =
        evaluate_policy(constant_policy(AllocationAction{}), split.test, scaler, t.config.environment);
    c.expect(trained.report.mae < uniform.report.mae,
             "MAE " + num(trained.report.mae) + " vs uniform " + num(uniform.report.mae));
    return c.outcome("episode reward " + num(first, 4) + " -> " + num(last, 4) + " over " +
                     std::to_string(rewards.size()) + " episodes; test MAE " +
                     num(trained.report.mae, 4) + " vs uniform " + num(uniform.report.mae, 4));
}

Outcome ga_guarantees() {
    Checks c;
    const auto& t = trained_fixture();
    GaConfig ga;
    ga.generations = 10;
    ga.population_size = 5;
    ga.elite_fraction = 0.4;
    ga.mutation_rate = 0.1;
    ga.seed = t.config.ga_seed();
    const auto split = chrono_split(load_series(t.config.data_path).series, t.config.train_fraction);
    BudgetEnv env(split.train, fit_scaler(split.train), t.config.environment);
    const auto r = evolve(t.result.policy.actor, env, ga);
    c.expect(r.logs.size() == 10, "10 generations logged");
    for (std::size_t g = 1; g < r.logs.size(); ++g) {
        c.expect(r.logs[g].best >= r.logs[g - 1].best, "best fitness drops at generation " + std::to_string(g));
    }
    const double input_fitness = evaluate_fitness(t.result.policy.actor.params,
                                                  t.result.policy.actor.spec, env);
    c.expect(r.best_fitness >= input_fitness, "final best below the input policy");
    return c.outcome("fitness " + num(input_fitness, 6) + " -> " + num(r.best_fitness, 6));
}

Outcome mutation_statistics() {
    Checks c;
    GaConfig cfg;
    cfg.mutation_rate = 1.0;
    std::mt19937_64 rng(6060);
    const auto m = quantum_mutate(ParamVector(100'000, 0.0), cfg, rng);
    const auto& d = m.perturbations;
    c.expect(d.size() == 100'000, "sample count");
    double mean = 0.0;
    bool bounded = true;
    for (double v : d) {
        mean += v;
        bounded = bounded && std::abs(v) <= cfg.eta;
    }
    mean /= static_cast<double>(d.size());
    double m2 = 0.0, m3 = 0.0;
    for (double v : d) {
        m2 += (v - mean) * (v - mean);
        m3 += (v - mean) * (v - mean) * (v - mean);
    }
    m2 /= static_cast<double>(d.size());
    m3 /= static_cast<double>(d.size());
    const double skew = m3 / std::pow(m2, 1.5);
    const double bound = 4.0 * (cfg.eta / std::sqrt(2.0)) / std::sqrt(1e5);
    c.expect(bounded, "some |delta| > eta");
    c.expect(std::abs(mean) <= bound, "mean " + num(mean) + " exceeds " + num(bound));
    c.expect(std::abs(skew) < 0.05, "skewness " + num(skew));
    return c.outcome("mean " + num(mean, 3) + " (bound " + num(bound, 3) + "), skewness " + num(skew, 3));
}

Outcome metric_fixtures() {
    Checks c;
    const auto p = [](std::array<double, 2> pred, std::array<double, 2> actual) {
        return AllocationPair{pred, EmpiricalAllocation{actual}};
    };
    const std::vector<AllocationPair> same{p({0.3, 0.7}, {0.3, 0.7})};
    const std::vector<AllocationPair> one{p({0.6, 0.4}, {0.5, 0.5})};
    const std::vector<AllocationPair> two{p({0.6, 0.4}, {0.5, 0.5}), p({0.2, 0.8}, {0.5, 0.5})};
    const std::vector<AllocationPair> orth{p({1.0, 0.0}, {0.0, 1.0})};
    const std::vector<AllocationPair> kl_case{p({0.5, 0.5}, {0.75, 0.25})};
    const std::vector<AllocationPair> point{p({1.0, 0.0}, {1.0, 0.0})};
    c.expect(mae(same) == 0.0 && rmse(same) == 0.0, "identical MAE/RMSE");
    c.expect(near(mae(one), 0.1, 1e-6), "MAE 0.1");
    c.expect(near(mae(two), 0.2, 1e-6), "MAE 0.2");
    c.expect(near(rmse(one), 0.1, 1e-6), "RMSE 0.1");
    c.expect(near(rmse(two), std::sqrt(0.05), 1e-6), "RMSE sqrt(0.05)");
    c.expect(near(cosine_similarity(same), 1.0, 1e-6), "cosine 1");
    c.expect(near(cosine_similarity(orth), 0.0, 1e-6), "cosine 0");
    c.expect(near(cosine_similarity(one), 0.98058, 1e-5), "cosine 0.98058");
    c.expect(near(kl_divergence(same), 0.0, 1e-6), "KL identical");
    c.expect(near(kl_divergence(kl_case), 0.130812, 1e-6), "KL 0.130812");
    c.expect(kl_divergence(point) == 0.0, "KL zero mass");

    const auto split = chrono_split(testing::fixture_series(), 0.8);
    const auto scaler = fit_scaler(split.train);
    const auto ref = testing::reference_values()["uniform_policy_test_metrics"];
    const auto u = evaluate_policy(constant_policy(AllocationAction{}), split.test, scaler).report;
    c.expect(near(u.mae, ref["mae"].get<double>(), 1e-6), "uniform MAE");
    c.expect(near(u.rmse, ref["rmse"].get<double>(), 1e-6), "uniform RMSE");
    c.expect(near(u.cosine_similarity, ref["cosine_similarity"].get<double>(), 1e-6), "uniform cosine");
    c.expect(near(u.kl_divergence, ref["kl_divergence"].get<double>(), 1e-6), "uniform KL");
    c.expect(u.n_quarters == split.test.size() - 1, "n_quarters");

    const auto& test = split.test;
    const Policy oracle = [&test](const EnvState&, std::size_t t) {
        return AllocationAction{empirical_allocation(test, t).weights};
    };
    const auto o = evaluate_policy(oracle, test, scaler).report;
    c.expect(o.mae <= 1e-12, "oracle MAE");
    c.expect(near(o.cosine_similarity, 1.0, 1e-12), "oracle cosine");
    c.expect(std::abs(o.kl_divergence) <= 1e-12, "oracle KL");
    return c.outcome("worked examples, fixture baseline and oracle policy agree");
}

Outcome determinism() {
    Checks c;
    testing::TempDir dir("acceptance-determinism");
    std::vector<fs::path> outs{dir.path() / "run1", dir.path() / "run2"};
    for (const auto& out : outs) {
        auto cfg = fixture_config();
        cfg.output_dir = out;
        cfg.propagate_seeds();
        std::ostringstream log;
        cli::cmd_pipeline(cfg, log);
    }
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(outs[0])) {
        const auto name = entry.path().filename();
        if (name == cli::files::kSummary) {
            // The summary embeds the output directory, which differs by design.
            std::ifstream a(outs[0] / name), b(outs[1] / name);
            auto ja = json::parse(a), jb = json::parse(b);
            ja["config"].erase("output_dir");
            jb["config"].erase("output_dir");
            c.expect(ja == jb, "summary.json differs");
        } else {
            c.expect(testing::slurp(entry.path()) == testing::slurp(outs[1] / name),
                     name.string() + " differs");
        }
        ++n;
    }
    c.expect(n >= 16, "expected at least 16 artifacts, found " + std::to_string(n));
    return c.outcome(std::to_string(n) + " artifacts identical across two pipeline runs");
}

Outcome apple_directional() {
    const char* csv = std::getenv("FISCALFORGE_APPLE_CSV");
    const std::string reference =
        "reference cosine 0.9990, KL 0.0023; the reference table lists MAE 0.1047 above RMSE "
        "0.1044, which no single residual convention allows";
    if (csv == nullptr || *csv == '\0') {
        return {Status::skip, "set FISCALFORGE_APPLE_CSV to run; " + reference};
    }
    testing::TempDir dir("acceptance-apple");
    auto cfg = cli::load_run_config(testing::source_dir() / "configs" / "apple.json");
    cfg.data_path = csv;
    cfg.output_dir = dir.path();
    cfg.seed = 60;
    cfg.propagate_seeds();
    std::ostringstream log;
    cli::cmd_pipeline(cfg, log);
    std::ifstream in(dir.path() / cli::files::kMetrics);
    const auto m = json::parse(in);
    const double cosine = m["cosine_similarity"].get<double>();
    const double kl = m["kl_divergence"].get<double>();
    const std::string detail = "cosine " + num(cosine, 4) + ", KL " + num(kl, 4) + ", MAE " +
                               num(m["mae"].get<double>(), 4) + ", RMSE " +
                               num(m["rmse"].get<double>(), 4) + "; " + reference;
    return {cosine >= 0.95 && kl <= 0.05 ? Status::pass : Status::fail, detail};
}

struct Criterion {
    int id;
    const char* name;
    bool gating;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const std::vector<Criterion> criteria{
        {1, "special functions", true, special_functions},
        {2, "gradient correctness", true, gradients},
        {3, "environment algebra", true, environment_algebra},
        {4, "TD3 learning progress", true, td3_progress},
        {5, "GA guarantees", true, ga_guarantees},
        {6, "quantum mutation statistics", true, mutation_statistics},
        {7, "metric fixtures", true, metric_fixtures},
        {8, "pipeline determinism", true, determinism},
        {9, "directional check on real data (non-gating)", false, apple_directional},
    };

    bool ok = true;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* label = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
        std::cout << "criterion " << c.id << " " << label << "  " << c.name << " ["
                  << std::fixed << std::setprecision(1) << secs << "s] " << o.detail << std::endl;
        std::cout.unsetf(std::ios::fixed);
        if (c.gating && o.status != Status::pass) ok = false;
    }
    std::cout << (ok ? "acceptance: all gating criteria passed" : "acceptance: FAILED") << std::endl;
    return ok ? 0 : 1;
}
