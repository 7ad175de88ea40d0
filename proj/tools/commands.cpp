#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fiscalforge/fiscalforge.hpp"

namespace fiscalforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PreparedData {
    SeriesSplit split;
    ScalerParams scaler;
};

PreparedData prepare_data(const RunConfig& config) {
    if (!fs::exists(config.data_path)) {
        throw DataError("data file not found: '" + config.data_path.string() + "'");
    }
    auto loaded = load_series(config.data_path);
    spdlog::info("loaded {} quarters from {} ({} rows dropped)", loaded.series.size(),
                 config.data_path.string(), loaded.dropped_rows);
    PreparedData data;
    data.split = chrono_split(loaded.series, config.train_fraction);
    data.scaler = fit_scaler(data.split.train);
    spdlog::info("split: {} train / {} test quarters", data.split.train.size(),
                 data.split.test.size());
    return data;
}

fs::path artifact(const RunConfig& config, std::string_view name) {
    return config.output_dir / fs::path(name);
}

void ensure_output_dir(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
        throw ArtifactError("cannot create output directory '" + config.output_dir.string() +
                            "': " + ec.message());
    }
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_json(const fs::path& path, const json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

Network load_actor(const fs::path& path, const RunConfig& config) {
    auto net = load_checkpoint(path);
    const auto expected = actor_spec(config.td3.actor_hidden);
    if (!(net.spec == expected)) {
        throw ArtifactError("checkpoint '" + path.string() +
                            "' does not match the configured actor architecture");
    }
    return net;
}

std::string fixed4(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

double tail_mean(const std::vector<double>& v, std::size_t n) {
    if (v.empty()) return std::nan("");
    const auto k = std::min(n, v.size());
    return std::accumulate(v.end() - static_cast<std::ptrdiff_t>(k), v.end(), 0.0) /
           static_cast<double>(k);
}

}  // namespace

RunConfig resolve_config(const CommandOptions& options) {
    auto config = load_run_config(options.config_path);
    if (options.out_dir) config.output_dir = *options.out_dir;
    if (options.seed) config.seed = *options.seed;
    config.propagate_seeds();
    return config;
}

void cmd_train(const RunConfig& config, std::ostream& out) {
    const auto data = prepare_data(config);
    ensure_output_dir(config);
    BudgetEnv env(data.split.train, data.scaler, config.environment);

    spdlog::info("training TD3 for {} timesteps (seed {})", config.td3.total_timesteps,
                 config.td3.seed);
    const auto result = train(env, config.td3);
    spdlog::info("training done: {} episodes, {} critic / {} actor updates",
                 result.policy.episode_rewards.size(), result.critic_updates,
                 result.actor_updates);

    save_checkpoint(artifact(config, files::kActor), result.policy.actor);
    save_checkpoint(artifact(config, files::kCritic1), result.critic1);
    save_checkpoint(artifact(config, files::kCritic2), result.critic2);
    save_checkpoint(artifact(config, files::kActorTarget), result.actor_target);
    save_checkpoint(artifact(config, files::kCritic1Target), result.critic1_target);
    save_checkpoint(artifact(config, files::kCritic2Target), result.critic2_target);
    write_json(artifact(config, files::kActorJson), checkpoint_to_json(result.policy.actor));

    json history = json::array();
    const auto& rewards = result.policy.episode_rewards;
    for (std::size_t e = 0; e < rewards.size(); ++e) {
        history.push_back({{"episode", e}, {"cumulative_reward", rewards[e]}});
    }
    write_json(artifact(config, files::kHistory), history);

    out << "episodes: " << rewards.size() << '\n';
    out << "final-10-episode mean reward: " << fixed4(tail_mean(rewards, 10)) << '\n';
}

void cmd_refine(const RunConfig& config, const fs::path& checkpoint, std::ostream& out) {
    const auto data = prepare_data(config);
    const auto base = load_actor(checkpoint, config);
    ensure_output_dir(config);
    BudgetEnv env(data.split.train, data.scaler, config.environment);

    spdlog::info("refining for {} generations, population {}", config.ga.generations,
                 config.ga.population_size);
    const auto result = evolve(base, env, config.ga);

    auto gen_log = open_output(artifact(config, files::kGenerations));
    auto samples = open_output(artifact(config, files::kPerturbations));
    samples.precision(17);
    for (const auto& log : result.logs) {
        json line = {{"generation", log.generation},
                     {"best", log.best},
                     {"mean", log.mean},
                     {"fitnesses", log.fitnesses},
                     {"n_mutations", log.n_mutations()}};
        gen_log << line.dump() << '\n';
        for (double d : log.perturbations) samples << d << '\n';
        out << "generation " << log.generation << ": best fitness " << fixed4(log.best)
            << " (mean " << fixed4(log.mean) << ")\n";
    }
    save_checkpoint(artifact(config, files::kRefined), result.best);
    write_json(artifact(config, files::kRefinedJson), checkpoint_to_json(result.best));
    out << "base fitness " << fixed4(result.base_fitness) << ", refined fitness "
        << fixed4(result.best_fitness) << '\n';
}

void cmd_evaluate(const RunConfig& config, const fs::path& checkpoint, std::ostream& out,
                  std::string_view file_prefix) {
    const auto data = prepare_data(config);
    const auto actor = load_actor(checkpoint, config);
    ensure_output_dir(config);

    const auto name = [&](std::string_view base) { return std::string(file_prefix) + std::string(base); };
    const auto result = evaluate_policy(actor_policy(actor), data.split.test, data.scaler,
                                        config.environment);

    {
        // Replays the same greedy rollout with tracing enabled.
        auto trace = open_output(artifact(config, name(files::kTrace)));
        BudgetEnv env(data.split.test, data.scaler, config.environment);
        env.set_trace(&trace);
        auto state = env.reset();
        while (!env.done()) state = env.step(forward_actor(actor.params, actor.spec, state)).next_state;
    }

    write_json(artifact(config, name(files::kMetrics)), metrics_to_json(result.report));
    auto pairs = open_output(artifact(config, name(files::kPairs)));
    write_pairs_csv(pairs, result.pairs);

    const auto& r = result.report;
    out << "MAE " << fixed4(r.mae) << "  RMSE " << fixed4(r.rmse) << "  cosine "
        << fixed4(r.cosine_similarity) << "  KL " << fixed4(r.kl_divergence) << "  ("
        << r.n_quarters << " quarters)\n";
}

void cmd_pipeline(const RunConfig& config, std::ostream& out) {
    out << "== train\n";
    cmd_train(config, out);
    out << "== refine\n";
    cmd_refine(config, artifact(config, files::kActor), out);
    out << "== evaluate (TD3 policy)\n";
    cmd_evaluate(config, artifact(config, files::kActor), out, "td3_");
    out << "== evaluate (refined policy)\n";
    cmd_evaluate(config, artifact(config, files::kRefined), out);

    const auto data = prepare_data(config);
    BudgetEnv env(data.split.train, data.scaler, config.environment);
    const auto td3_actor = load_checkpoint(artifact(config, files::kActor));
    const auto refined = load_checkpoint(artifact(config, files::kRefined));
    const double pre_fit = evaluate_fitness(td3_actor.params, td3_actor.spec, env);
    const double post_fit = evaluate_fitness(refined.params, refined.spec, env);

    const auto read_json = [&](std::string_view name) {
        std::ifstream in(artifact(config, name));
        return json::parse(in);
    };
    const auto pre = read_json("td3_metrics.json");
    const auto post = read_json(files::kMetrics);
    write_json(artifact(config, files::kSummary),
               {{"pre_refinement", {{"fitness", pre_fit}, {"metrics", pre}}},
                {"post_refinement", {{"fitness", post_fit}, {"metrics", post}}},
                {"config", run_config_to_json(config)}});

    out << "summary: fitness " << fixed4(pre_fit) << " -> " << fixed4(post_fit) << ", MAE "
        << fixed4(pre.at("mae").get<double>()) << " -> " << fixed4(post.at("mae").get<double>())
        << ", cosine " << fixed4(pre.at("cosine_similarity").get<double>()) << " -> "
        << fixed4(post.at("cosine_similarity").get<double>()) << ", KL "
        << fixed4(pre.at("kl_divergence").get<double>()) << " -> "
        << fixed4(post.at("kl_divergence").get<double>()) << '\n';
}

int run_command(std::string_view command, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
    try {
        const auto config = resolve_config(options);
        if (command == "train") {
            cmd_train(config, out);
        } else if (command == "refine") {
            cmd_refine(config, options.checkpoint.value_or(artifact(config, files::kActor)), out);
        } else if (command == "evaluate") {
            fs::path ckpt;
            if (options.checkpoint) {
                ckpt = *options.checkpoint;
            } else if (fs::exists(artifact(config, files::kRefined))) {
                ckpt = artifact(config, files::kRefined);
            } else {
                ckpt = artifact(config, files::kActor);
            }
            cmd_evaluate(config, ckpt, out);
        } else if (command == "pipeline") {
            cmd_pipeline(config, out);
        } else {
            err << "error: unknown command '" << command << "'\n";
            return kExitUsage;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ArtifactError& e) {
        err << "artifact error: " << e.what() << '\n';
        return kExitArtifact;
    } catch (const ShapeError& e) {
        err << "artifact error: " << e.what() << '\n';
        return kExitArtifact;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DomainError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const fiscalforge::Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "artifact error: " << e.what() << '\n';
        return kExitArtifact;
    } catch (const json::exception& e) {
        err << "artifact error: " << e.what() << '\n';
        return kExitArtifact;
    }
}

}  // namespace fiscalforge::cli
