#pragma once

/// Configuration ingestion, experiment orchestration, and report emission.
///
/// Every subcommand reads one strict-schema JSON config, runs the requested
/// experiment, and writes two files into the output directory: a report
/// (pure mathematical content, byte-identical across runs with the same
/// config and seed) and a manifest (provenance: config hash, tool version,
/// seeds, timing, report paths, exit code).  Timestamps live only in the
/// manifest so reports stay reproducible.
///
/// Exit-code contract:
///   0  success, including mathematically expected negative results
///      (a "not expansive" verdict or a reproduced shadowing failure);
///   1  inconclusive: the analysis could not decide (no splitting
///      certificate for a synthesis run, horizon-limited evidence only);
///   2  bad input: config rejected, or the requested guarantee is ruled out
///      by the config's own parameters (inadmissible perturbation);
///   3  a measured quantity exceeded its analytic bound — the bounds are
///      proven guarantees, so this signals an implementation bug.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shadowlab/conjugacy.hpp"
#include "shadowlab/hyperbolicity.hpp"
#include "shadowlab/operators.hpp"
#include "shadowlab/rng.hpp"
#include "shadowlab/serialize.hpp"
#include "shadowlab/shadowing.hpp"
#include "shadowlab/spaces.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitInconclusive = 1,
    kExitBadInput = 2,
    kExitBoundViolation = 3,
};

/// Options shared by every subcommand.  `seed_override` (from --seed or the
/// SHADOWLAB_SEED environment variable, in that precedence) replaces the
/// config's seed list with a single seed.
struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
};

/// --- Config records (strict schemas; unknown keys rejected) -----------------

struct ClassifyConfig {
    LinearOp op;
    SeminormFamily fam;
    std::vector<int> grades;
    std::int64_t horizon = 2000;
};

enum class ShadowRunMode { Finite, Periodic, TwoSided, Counterexample, Adversarial };

struct ShadowConfig {
    ShadowRunMode mode = ShadowRunMode::Finite;
    // Synthesis modes (finite | periodic | two-sided).
    LinearOp op;
    SeminormFamily fam;
    int grade = 1;
    double epsilon = 0.1;
    std::int64_t length = 1; // chain length, cycle period, or two-sided half-width
    IndexWindow window{0, 0};
    std::vector<std::uint64_t> seeds;
    double tolerance = 1e-12;
    bool trace_csv = false;
    // Counterexample and adversarial modes.
    double delta = 0.0;
    std::optional<MultiplicationOperator> mult;
    std::int64_t steps = 0;
};

struct ConjugacyConfig {
    LinearOp op;
    SeminormFamily fam;
    int grade = 1;
    double epsilon = 0.1;
    Perturbation g;
    double tolerance = 1e-10;
    std::int64_t samples = 1;
    IndexWindow window{0, 0};
    std::vector<std::uint64_t> seeds; // empty when explicit points are given
    std::vector<SeqVec> points;       // explicit sample points (bypass the rng)
};

/// Structural check of a stored pseudotrajectory against its operator.
struct PseudoCheckConfig {
    LinearOp op;
    SeminormFamily fam;
    Pseudotrajectory pt;
};

struct ExperimentConfig {
    std::string command; // "classify" | "shadow" | "conjugacy" | "validate"
    std::variant<ClassifyConfig, ShadowConfig, ConjugacyConfig, PseudoCheckConfig> body;
};

/// Parse and validate a config document.  Throws ConfigError on any schema
/// violation: unknown keys, missing keys, wrong types, out-of-range values.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);

/// --- Helpers (exposed for tests) ---------------------------------------------

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Canonical JSON text: two-space indent, lexicographic keys, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

/// Deterministic sample point: unit seminorm at `grade`, support inside
/// `window`, one site pinned near zero so the seminorm cannot vanish.
SeqVec random_unit_point(Rng& rng, const IndexWindow& window, const SeminormFamily& fam,
                         int grade);

/// --- Subcommands ---------------------------------------------------------------

int cmd_classify(const CliOptions& opts);
int cmd_shadow(const CliOptions& opts);
int cmd_conjugacy(const CliOptions& opts);
int cmd_validate(const CliOptions& opts);

/// Dispatch by subcommand name, mapping thrown errors to the exit-code
/// contract (ConfigError/PreconditionError -> 2, anything else -> 1).
int run_cli(const std::string& command, const CliOptions& opts);

} // namespace shadowlab
