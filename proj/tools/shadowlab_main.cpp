#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shadowlab/cli.hpp"

namespace {

/// SHADOWLAB_SEED overrides the config seed; an explicit --seed beats both.
std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("SHADOWLAB_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0') {
        throw shadowlab::ConfigError("SHADOWLAB_SEED is not a valid unsigned integer");
    }
    return static_cast<std::uint64_t>(v);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadowlab: splitting certificates, shadowing experiments, and "
                 "conjugacy constructions for weighted shifts on sequence spaces"};
    app.require_subcommand(1);

    struct SubState {
        shadowlab::CliOptions opts;
        bool seed_given = false;
        std::uint64_t seed = 0;
    };
    SubState states[4];
    const char* names[4] = {"classify", "shadow", "conjugacy", "validate"};
    const char* blurbs[4] = {
        "detect a splitting and classify expansivity",
        "synthesize or refute shadowing for pseudotrajectories",
        "build the conjugacy series and radial homeomorphisms",
        "schema-validate a config or a stored pseudotrajectory",
    };
    for (int i = 0; i < 4; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", states[i].opts.config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", states[i].opts.out_dir, "output directory (default: .)");
        sub->add_option("--seed", states[i].seed, "override every configured seed")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--jobs", states[i].opts.jobs, "worker threads for batch trials")
            ->check(CLI::Range(1, 64));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : shadowlab::kExitBadInput;
    }

    for (int i = 0; i < 4; ++i) {
        CLI::App* sub = app.get_subcommand(names[i]);
        if (!sub->parsed()) continue;
        states[i].seed_given = sub->count("--seed") > 0;
        try {
            if (states[i].seed_given) {
                states[i].opts.seed_override = states[i].seed;
            } else {
                states[i].opts.seed_override = env_seed();
            }
        } catch (const shadowlab::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return shadowlab::kExitBadInput;
        }
        return shadowlab::run_cli(names[i], states[i].opts);
    }
    return shadowlab::kExitBadInput;
}
