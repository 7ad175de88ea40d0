#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "run_config.hpp"

namespace fiscalforge::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitArtifact = 3,
    kExitNumeric = 4,
};

struct CommandOptions {
    std::filesystem::path config_path;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> checkpoint;
};

// Artifact names inside the output directory.
namespace files {
inline constexpr std::string_view kActor = "actor.ckpt";
inline constexpr std::string_view kActorJson = "actor.json";
inline constexpr std::string_view kCritic1 = "critic1.ckpt";
inline constexpr std::string_view kCritic2 = "critic2.ckpt";
inline constexpr std::string_view kActorTarget = "actor_target.ckpt";
inline constexpr std::string_view kCritic1Target = "critic1_target.ckpt";
inline constexpr std::string_view kCritic2Target = "critic2_target.ckpt";
inline constexpr std::string_view kHistory = "history.json";
inline constexpr std::string_view kRefined = "actor_refined.ckpt";
inline constexpr std::string_view kRefinedJson = "actor_refined.json";
inline constexpr std::string_view kGenerations = "generations.jsonl";
inline constexpr std::string_view kPerturbations = "perturbations.csv";
inline constexpr std::string_view kMetrics = "metrics.json";
inline constexpr std::string_view kPairs = "pairs.csv";
inline constexpr std::string_view kTrace = "trace.jsonl";
inline constexpr std::string_view kSummary = "summary.json";
}  // namespace files

/// Loads the config and applies --out / --seed overrides.
RunConfig resolve_config(const CommandOptions& options);

// Each stage throws on failure; run_command maps exceptions to exit codes.
void cmd_train(const RunConfig& config, std::ostream& out);
void cmd_refine(const RunConfig& config, const std::filesystem::path& checkpoint, std::ostream& out);
void cmd_evaluate(const RunConfig& config, const std::filesystem::path& checkpoint,
                  std::ostream& out, std::string_view file_prefix = "");
void cmd_pipeline(const RunConfig& config, std::ostream& out);

/// Dispatches `train|refine|evaluate|pipeline`; returns the process exit code.
int run_command(std::string_view command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace fiscalforge::cli
