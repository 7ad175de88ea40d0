#include "run_config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "fiscalforge/errors.hpp"

namespace fiscalforge::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& into, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        into = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    if (p.empty() || p.is_absolute()) return p;
    return base / p;
}

}  // namespace

void RunConfig::propagate_seeds() {
    td3.seed = td3_seed();
    ga.seed = ga_seed();
}

void RunConfig::validate() const {
    if (data_path.empty()) throw ConfigError("data.path is required");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("data.train_fraction must lie in (0, 1)");
    }
    try {
        environment.validate();
        td3.validate();
        ga.validate();
    } catch (const fiscalforge::Error& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    reject_unknown(doc, {"seed", "output_dir", "data", "environment", "td3", "ga"}, "config");
    RunConfig cfg;
    read(doc, "seed", cfg.seed, "config");
    std::string out_dir = cfg.output_dir.string();
    read(doc, "output_dir", out_dir, "config");
    cfg.output_dir = resolve(out_dir, base_dir);

    if (doc.contains("data")) {
        const auto& d = doc.at("data");
        reject_unknown(d, {"path", "train_fraction"}, "data");
        std::string path;
        read(d, "path", path, "data");
        cfg.data_path = resolve(path, base_dir);
        read(d, "train_fraction", cfg.train_fraction, "data");
    }

    if (doc.contains("environment")) {
        const auto& e = doc.at("environment");
        reject_unknown(e, {"lambda1", "lambda2", "confidence", "prior"}, "environment");
        read(e, "lambda1", cfg.environment.lambda1, "environment");
        read(e, "lambda2", cfg.environment.lambda2, "environment");
        read(e, "confidence", cfg.environment.confidence, "environment");
        if (e.contains("prior")) {
            std::vector<double> prior;
            read(e, "prior", prior, "environment");
            try {
                cfg.environment.prior = ConcentrationVector(std::move(prior));
            } catch (const fiscalforge::Error& err) {
                throw ConfigError(std::string("environment.prior: ") + err.what());
            }
        }
    }

    if (doc.contains("td3")) {
        const auto& t = doc.at("td3");
        reject_unknown(t,
                       {"total_timesteps", "gamma", "tau", "actor_delay", "batch_size",
                        "buffer_capacity", "exploration_sigma", "target_noise_sigma",
                        "target_noise_clip", "learning_rate", "warmup_steps", "actor_hidden",
                        "critic_hidden", "optimizer"},
                       "td3");
        auto& c = cfg.td3;
        read(t, "total_timesteps", c.total_timesteps, "td3");
        read(t, "gamma", c.gamma, "td3");
        read(t, "tau", c.tau, "td3");
        read(t, "actor_delay", c.actor_delay, "td3");
        read(t, "batch_size", c.batch_size, "td3");
        read(t, "buffer_capacity", c.buffer_capacity, "td3");
        read(t, "exploration_sigma", c.exploration_sigma, "td3");
        read(t, "target_noise_sigma", c.target_noise_sigma, "td3");
        read(t, "target_noise_clip", c.target_noise_clip, "td3");
        read(t, "learning_rate", c.learning_rate, "td3");
        read(t, "warmup_steps", c.warmup_steps, "td3");
        read(t, "actor_hidden", c.actor_hidden, "td3");
        read(t, "critic_hidden", c.critic_hidden, "td3");
        if (t.contains("optimizer")) {
            std::string name;
            read(t, "optimizer", name, "td3");
            try {
                c.optimizer = parse_optimizer_kind(name);
            } catch (const fiscalforge::Error& err) {
                throw ConfigError(std::string("td3.optimizer: ") + err.what());
            }
        }
    }

    if (doc.contains("ga")) {
        const auto& g = doc.at("ga");
        reject_unknown(g,
                       {"generations", "population_size", "elite_fraction", "mutation_rate",
                        "init_sigma", "eta", "rotation_sigma", "episodes_per_eval", "eval_threads"},
                       "ga");
        auto& c = cfg.ga;
        read(g, "generations", c.generations, "ga");
        read(g, "population_size", c.population_size, "ga");
        read(g, "elite_fraction", c.elite_fraction, "ga");
        read(g, "mutation_rate", c.mutation_rate, "ga");
        read(g, "init_sigma", c.init_sigma, "ga");
        read(g, "eta", c.eta, "ga");
        read(g, "rotation_sigma", c.rotation_sigma, "ga");
        read(g, "episodes_per_eval", c.episodes_per_eval, "ga");
        read(g, "eval_threads", c.eval_threads, "ga");
    }

    cfg.propagate_seeds();
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

json run_config_to_json(const RunConfig& c) {
    return {
        {"seed", c.seed},
        {"output_dir", c.output_dir.string()},
        {"data", {{"path", c.data_path.string()}, {"train_fraction", c.train_fraction}}},
        {"environment",
         {{"lambda1", c.environment.lambda1},
          {"lambda2", c.environment.lambda2},
          {"confidence", c.environment.confidence},
          {"prior", std::vector<double>(c.environment.prior.values().begin(),
                                        c.environment.prior.values().end())}}},
        {"td3",
         {{"total_timesteps", c.td3.total_timesteps},
          {"gamma", c.td3.gamma},
          {"tau", c.td3.tau},
          {"actor_delay", c.td3.actor_delay},
          {"batch_size", c.td3.batch_size},
          {"buffer_capacity", c.td3.buffer_capacity},
          {"exploration_sigma", c.td3.exploration_sigma},
          {"target_noise_sigma", c.td3.target_noise_sigma},
          {"target_noise_clip", c.td3.target_noise_clip},
          {"learning_rate", c.td3.learning_rate},
          {"warmup_steps", c.td3.warmup_steps},
          {"actor_hidden", c.td3.actor_hidden},
          {"critic_hidden", c.td3.critic_hidden},
          {"optimizer", std::string(to_string(c.td3.optimizer))}}},
        {"ga",
         {{"generations", c.ga.generations},
          {"population_size", c.ga.population_size},
          {"elite_fraction", c.ga.elite_fraction},
          {"mutation_rate", c.ga.mutation_rate},
          {"init_sigma", c.ga.init_sigma},
          {"eta", c.ga.eta},
          {"rotation_sigma", c.ga.rotation_sigma},
          {"episodes_per_eval", c.ga.episodes_per_eval},
          {"eval_threads", c.ga.eval_threads}}},
    };
}

}  // namespace fiscalforge::cli
