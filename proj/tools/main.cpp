#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("fiscalforge");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("FISCALFORGE_LOG")) {
        const std::string l = level;
        if (l == "error") spdlog::set_level(spdlog::level::err);
        else if (l == "info") spdlog::set_level(spdlog::level::info);
        else if (l == "debug") spdlog::set_level(spdlog::level::debug);
        else if (l == "trace") spdlog::set_level(spdlog::level::trace);
        else spdlog::warn("ignoring unknown FISCALFORGE_LOG level '{}'", l);
    }
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"fiscalforge: learn and refine budget-allocation policies"};
    app.require_subcommand(1);

    fiscalforge::cli::CommandOptions options;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string checkpoint;

    for (const auto* name : {"train", "refine", "evaluate", "pipeline"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", options.config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "master seed (overrides config)");
        if (std::string(name) == "refine" || std::string(name) == "evaluate") {
            sub->add_option("--checkpoint", checkpoint, "actor checkpoint to read");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fiscalforge::cli::kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->count("--out") > 0) options.out_dir = out_dir;
    if (sub->count("--seed") > 0) options.seed = seed;
    if (sub->get_option_no_throw("--checkpoint") != nullptr && sub->count("--checkpoint") > 0) {
        options.checkpoint = checkpoint;
    }
    return fiscalforge::cli::run_command(sub->get_name(), options, std::cout, std::cerr);
}
