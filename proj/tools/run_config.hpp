#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "fiscalforge/environment.hpp"
#include "fiscalforge/quantum_ga.hpp"
#include "fiscalforge/td3.hpp"

namespace fiscalforge::cli {

// Malformed or inconsistent run configuration; maps to the usage exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path data_path;
    double train_fraction = 0.8;
    EnvConfig environment;
    Td3Config td3;
    GaConfig ga;
    std::filesystem::path output_dir = "fiscalforge-out";
    std::uint64_t seed = 60;

    // Stage seeds derived from the master seed.
    std::uint64_t env_seed() const { return seed + 1; }
    std::uint64_t td3_seed() const { return seed + 2; }
    std::uint64_t ga_seed() const { return seed + 3; }

    /// Copies the derived stage seeds into td3/ga.
    void propagate_seeds();
    void validate() const;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json run_config_to_json(const RunConfig& config);

}  // namespace fiscalforge::cli
