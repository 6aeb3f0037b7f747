#include "shadowlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

using nlohmann::json;

constexpr std::int64_t kMaxTrials = 10'000;
constexpr std::int64_t kMaxChainLength = 100'000;
constexpr std::int64_t kMaxSamples = 100'000;
constexpr int kMaxJobs = 64;

/// Relative-plus-absolute slack for comparing a measured quantity against its
/// analytic bound: wide enough for accumulated roundoff, far too tight for a
/// genuine bound violation to slip through.
bool within_bound(double measured, double bound) {
    return measured <= bound * (1.0 + 1e-9) + 1e-12;
}

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void expect_config_keys(const json& j, std::initializer_list<const char*> required,
                        std::initializer_list<const char*> optional, const char* what) {
    if (!j.is_object()) bad(std::string(what) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : required)
            if (item.key() == k) {
                known = true;
                break;
            }
        for (const char* k : optional)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) bad(std::string(what) + ": unknown key '" + item.key() + "'");
    }
    for (const char* k : required)
        if (!j.contains(k)) bad(std::string(what) + ": missing key '" + k + "'");
}

double cfg_positive(const json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + ": expected a positive number");
    const double v = j.get<double>();
    if (!std::isfinite(v) || !(v > 0.0)) bad(std::string(what) + ": expected a positive number");
    return v;
}

std::int64_t cfg_int(const json& j, const char* what) {
    if (!j.is_number_integer()) bad(std::string(what) + ": expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t cfg_seed(const json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        bad(std::string(what) + ": expected a non-negative integer seed");
    return j.get<std::uint64_t>();
}

int cfg_grade(const json& j) {
    const std::int64_t g = cfg_int(j, "grade");
    if (g < 1 || g > 1'000'000) bad("grade: expected an integer >= 1");
    return static_cast<int>(g);
}

/// Exactly one of "seed" / "seeds"; returns a nonempty list.
std::vector<std::uint64_t> cfg_seed_list(const json& j, const char* what) {
    const bool has_one = j.contains("seed");
    const bool has_many = j.contains("seeds");
    if (has_one == has_many)
        bad(std::string(what) + ": provide exactly one of 'seed' or 'seeds'");
    std::vector<std::uint64_t> seeds;
    if (has_one) {
        seeds.push_back(cfg_seed(j.at("seed"), "seed"));
    } else {
        if (!j.at("seeds").is_array() || j.at("seeds").empty())
            bad(std::string(what) + ": 'seeds' must be a nonempty array");
        for (const auto& e : j.at("seeds")) seeds.push_back(cfg_seed(e, "seeds entry"));
    }
    if (static_cast<std::int64_t>(seeds.size()) > kMaxTrials)
        bad(std::string(what) + ": too many seeds (max " + std::to_string(kMaxTrials) + ")");
    return seeds;
}

ClassifyConfig parse_classify(const json& j) {
    expect_config_keys(j, {"command", "operator", "space", "grades"}, {"horizon"},
                       "classify config");
    ClassifyConfig c;
    c.op = j.at("operator").get<LinearOp>();
    c.fam = j.at("space").get<SeminormFamily>();
    if (!j.at("grades").is_array() || j.at("grades").empty())
        bad("classify config: 'grades' must be a nonempty array");
    for (const auto& e : j.at("grades")) {
        const std::int64_t g = cfg_int(e, "grades entry");
        if (g < 1 || g > 1'000'000) bad("grades entry: expected an integer >= 1");
        c.grades.push_back(static_cast<int>(g));
    }
    if (j.contains("horizon")) {
        c.horizon = cfg_int(j.at("horizon"), "horizon");
        if (c.horizon < 1 || c.horizon > 1'000'000) bad("horizon: expected 1 <= horizon <= 1e6");
    }
    return c;
}

ShadowConfig parse_shadow(const json& j) {
    if (!j.contains("mode")) bad("shadow config: missing key 'mode'");
    if (!j.at("mode").is_string()) bad("shadow config: 'mode' must be a string");
    const std::string mode = j.at("mode").get<std::string>();
    ShadowConfig c;
    if (mode == "finite" || mode == "periodic" || mode == "two-sided") {
        c.mode = mode == "finite"    ? ShadowRunMode::Finite
                 : mode == "periodic" ? ShadowRunMode::Periodic
                                      : ShadowRunMode::TwoSided;
        expect_config_keys(
            j, {"command", "mode", "operator", "space", "grade", "epsilon", "length", "window"},
            {"tolerance", "trace_csv", "seed", "seeds"}, "shadow config");
        c.op = j.at("operator").get<LinearOp>();
        c.fam = j.at("space").get<SeminormFamily>();
        c.grade = cfg_grade(j.at("grade"));
        c.epsilon = cfg_positive(j.at("epsilon"), "epsilon");
        c.length = cfg_int(j.at("length"), "length");
        if (c.length < 1 || c.length > kMaxChainLength)
            bad("length: expected 1 <= length <= " + std::to_string(kMaxChainLength));
        c.window = j.at("window").get<IndexWindow>();
        c.seeds = cfg_seed_list(j, "shadow config");
        if (j.contains("tolerance")) c.tolerance = cfg_positive(j.at("tolerance"), "tolerance");
        if (j.contains("trace_csv")) {
            if (!j.at("trace_csv").is_boolean()) bad("trace_csv: expected a boolean");
            c.trace_csv = j.at("trace_csv").get<bool>();
        }
    } else if (mode == "counterexample") {
        c.mode = ShadowRunMode::Counterexample;
        expect_config_keys(j, {"command", "mode", "delta"}, {}, "counterexample config");
        c.delta = cfg_positive(j.at("delta"), "delta");
    } else if (mode == "adversarial") {
        c.mode = ShadowRunMode::Adversarial;
        expect_config_keys(j, {"command", "mode", "multiplication", "delta", "steps"}, {},
                           "adversarial config");
        c.mult = j.at("multiplication").get<MultiplicationOperator>();
        c.delta = cfg_positive(j.at("delta"), "delta");
        c.steps = cfg_int(j.at("steps"), "steps");
        if (c.steps < 1 || c.steps > kMaxChainLength)
            bad("steps: expected 1 <= steps <= " + std::to_string(kMaxChainLength));
    } else {
        bad("shadow config: unknown mode '" + mode +
            "' (expected finite|periodic|two-sided|counterexample|adversarial)");
    }
    return c;
}

ConjugacyConfig parse_conjugacy(const json& j) {
    expect_config_keys(j, {"command", "operator", "space", "grade", "epsilon", "perturbation"},
                       {"tolerance", "samples", "window", "seed", "seeds", "points"},
                       "conjugacy config");
    ConjugacyConfig c;
    c.op = j.at("operator").get<LinearOp>();
    c.fam = j.at("space").get<SeminormFamily>();
    c.grade = cfg_grade(j.at("grade"));
    c.epsilon = cfg_positive(j.at("epsilon"), "epsilon");
    c.g = j.at("perturbation").get<Perturbation>();
    if (j.contains("tolerance")) c.tolerance = cfg_positive(j.at("tolerance"), "tolerance");
    const bool explicit_points = j.contains("points");
    const bool seeded = j.contains("seed") || j.contains("seeds");
    if (explicit_points == seeded)
        bad("conjugacy config: provide either 'points' or a seed with 'window'/'samples'");
    if (explicit_points) {
        if (j.contains("samples") || j.contains("window"))
            bad("conjugacy config: 'points' excludes 'samples' and 'window'");
        if (!j.at("points").is_array() || j.at("points").empty())
            bad("conjugacy config: 'points' must be a nonempty array");
        for (const auto& e : j.at("points")) c.points.push_back(e.get<SeqVec>());
        if (static_cast<std::int64_t>(c.points.size()) > kMaxSamples)
            bad("conjugacy config: too many points");
    } else {
        if (!j.contains("window")) bad("conjugacy config: missing key 'window'");
        c.window = j.at("window").get<IndexWindow>();
        if (j.contains("samples")) {
            c.samples = cfg_int(j.at("samples"), "samples");
            if (c.samples < 1 || c.samples > kMaxSamples)
                bad("samples: expected 1 <= samples <= " + std::to_string(kMaxSamples));
        }
        c.seeds = cfg_seed_list(j, "conjugacy config");
    }
    return c;
}

PseudoCheckConfig parse_pseudo_check(const json& j) {
    expect_config_keys(j, {"command", "operator", "space", "pseudotrajectory"}, {},
                       "validate config");
    PseudoCheckConfig c;
    c.op = j.at("operator").get<LinearOp>();
    c.fam = j.at("space").get<SeminormFamily>();
    c.pt = j.at("pseudotrajectory").get<Pseudotrajectory>();
    return c;
}

/// --- File plumbing -------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << contents;
    if (!out) throw Error("short write to '" + path + "'");
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json aggregate_stats(const std::vector<double>& v) {
    json a;
    a["min"] = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
    a["median"] = median_of(v);
    a["max"] = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    return a;
}

/// Run `count` independent trials on up to `jobs` threads; `run(i)` must only
/// touch the i-th result slot.  Assembly stays single-writer: workers fill
/// disjoint slots, the caller reads them after every thread joined.
void run_trials(std::int64_t count, int jobs, const std::function<void(std::int64_t)>& run) {
    const int workers = std::max(1, std::min({jobs, kMaxJobs, static_cast<int>(count)}));
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) run(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) run(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Shared run state: config bytes, parsed document, output paths.
struct RunContext {
    std::string config_path;
    std::string out_dir;
    std::string config_hash;
    json config;
    std::vector<std::uint64_t> seeds; // after any override
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::string started_at = iso8601_utc_now();
    std::vector<std::string> report_paths;

    std::string out_path(const std::string& name) const {
        return (std::filesystem::path(out_dir) / name).string();
    }

    void emit_report(const std::string& name, const json& body) {
        const std::string path = out_path(name);
        write_file(path, canonical_dump(body));
        report_paths.push_back(path);
        std::cout << "report: " << path << "\n";
    }

    /// The manifest is the only file that carries timestamps and timing.
    void emit_manifest(const std::string& command, int exit_code, const json& extra = json()) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        json m;
        m["command"] = command;
        m["config_hash"] = config_hash;
        m["config_path"] = config_path;
        m["elapsed_ms"] = static_cast<std::int64_t>(elapsed);
        m["exit_code"] = exit_code;
        m["reports"] = report_paths;
        m["seeds"] = seeds;
        m["started_at"] = started_at;
        m["tool_version"] = kToolVersion;
        if (extra.is_object())
            for (const auto& item : extra.items()) m[item.key()] = item.value();
        const std::string path = out_path(command + "_manifest.json");
        write_file(path, canonical_dump(m));
        std::cout << "manifest: " << path << "\n";
    }
};

RunContext make_context(const CliOptions& opts) {
    RunContext ctx;
    ctx.config_path = opts.config_path;
    ctx.out_dir = opts.out_dir.empty() ? "." : opts.out_dir;
    std::filesystem::create_directories(ctx.out_dir);
    const std::string bytes = read_file(opts.config_path);
    ctx.config_hash = hex64(fnv1a64(bytes));
    ctx.config = json::parse(bytes, nullptr, false);
    if (ctx.config.is_discarded()) bad("config file is not valid JSON: " + opts.config_path);
    return ctx;
}

std::vector<std::uint64_t> resolve_seeds(const std::vector<std::uint64_t>& from_config,
                                         const CliOptions& opts) {
    if (opts.seed_override) return {*opts.seed_override};
    return from_config;
}

json report_header(const char* command, const RunContext& ctx) {
    json r;
    r["command"] = command;
    r["config_hash"] = ctx.config_hash;
    r["tool_version"] = kToolVersion;
    return r;
}

const char* confidence_name(ExpansivityVerdict::Confidence c) {
    switch (c) {
        case ExpansivityVerdict::Confidence::Analytic: return "analytic";
        case ExpansivityVerdict::Confidence::HorizonOnly: return "horizon_only";
        case ExpansivityVerdict::Confidence::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

const char* kind_name(ExpansivityKind k) {
    switch (k) {
        case ExpansivityKind::NotExpansive: return "not_expansive";
        case ExpansivityKind::PositivelyExpansiveForward: return "positively_expansive_forward";
        case ExpansivityKind::PositivelyExpansiveInverse: return "positively_expansive_inverse";
        case ExpansivityKind::Both: return "both";
        case ExpansivityKind::TopologicallyExpansive: return "topologically_expansive";
    }
    return "not_expansive";
}

/// Scalar multiples need no scan: the orbit seminorms are exactly |lambda|^n
/// times the start, so the verdict follows from |lambda| alone.
ExpansivityVerdict scalar_expansivity(const ScalarOperator& op, int first_grade) {
    ExpansivityVerdict v;
    const double mag = std::fabs(op.lambda);
    if (mag > 1.0) {
        v.kind = ExpansivityKind::PositivelyExpansiveForward;
    } else if (mag < 1.0) {
        v.kind = ExpansivityKind::PositivelyExpansiveInverse;
    } else {
        v.kind = ExpansivityKind::NotExpansive;
    }
    v.confidence = ExpansivityVerdict::Confidence::Analytic;
    v.witness_grade = v.kind == ExpansivityKind::NotExpansive ? 0 : first_grade;
    v.note = "scalar operator: orbit seminorms scale by |lambda| each step";
    return v;
}

} // namespace

/// --- Helpers (public) -------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

SeqVec random_unit_point(Rng& rng, const IndexWindow& window, const SeminormFamily& fam,
                         int grade) {
    const std::int64_t anchor = std::clamp<std::int64_t>(0, window.lo, window.hi);
    for (int attempt = 0; attempt < 100; ++attempt) {
        SeqVec x(window);
        x.set(anchor, rng.uniform(0.1, 1.0) * (rng.u01() < 0.5 ? -1.0 : 1.0));
        const std::int64_t extra = std::min<std::int64_t>(7, window.width() - 1);
        for (std::int64_t i = 0; i < extra; ++i) {
            const std::int64_t site = window.lo + rng.index(window.width());
            x.set(site, rng.uniform(-1.0, 1.0));
        }
        const double s = seminorm_eval(fam, grade, x);
        if (s > 0.0 && std::isfinite(s)) return vec_scale(1.0 / s, x);
    }
    throw PreconditionError("could not draw a sample with positive finite seminorm");
}

/// --- classify -----------------------------------------------------------------------

int cmd_classify(const CliOptions& opts) {
    RunContext ctx = make_context(opts);
    const ExperimentConfig cfg = parse_experiment_config(ctx.config);
    if (cfg.command != "classify") bad("config 'command' is not \"classify\"");
    const auto& c = std::get<ClassifyConfig>(cfg.body);
    ctx.seeds = resolve_seeds({}, opts);

    const SplitDetection split = detect_split(c.op, c.fam, c.grades);
    ExpansivityVerdict verdict;
    if (const auto* shift = std::get_if<ShiftOperator>(&c.op)) {
        verdict = classify_expansivity_shift(*shift, c.fam, c.grades, c.horizon);
    } else {
        verdict = scalar_expansivity(std::get<ScalarOperator>(c.op), c.grades.front());
    }

    json report = report_header("classify", ctx);
    report["split"] = split;
    report["expansivity"] = verdict;
    ctx.emit_report("classify_report.json", report);

    const bool definitive = split.has_certificate() ||
                            verdict.confidence == ExpansivityVerdict::Confidence::Analytic;
    const int code = definitive ? kExitOk : kExitInconclusive;
    std::cout << "split: " << (split.has_certificate() ? "certificate" : "none") << "\n"
              << "expansivity: " << kind_name(verdict.kind) << " ("
              << confidence_name(verdict.confidence) << ")\n"
              << "exit: " << code << "\n";
    ctx.emit_manifest("classify", code);
    return code;
}

/// --- shadow --------------------------------------------------------------------------

namespace {

struct ShadowTrial {
    std::uint64_t seed = 0;
    ShadowReport report;
    PseudoValidation validation;
    bool bounds_hold = false;
};

int shadow_synthesis(RunContext& ctx, const ShadowConfig& c, const CliOptions& opts) {
    const char* mode_name = c.mode == ShadowRunMode::Finite     ? "finite"
                            : c.mode == ShadowRunMode::Periodic ? "periodic"
                                                                : "two-sided";
    const SplitDetection split = detect_split(c.op, c.fam, {c.grade});
    if (!split.has_certificate()) {
        json report = report_header("shadow", ctx);
        report["mode"] = mode_name;
        report["certificate"] = nullptr;
        report["no_certificate_reason"] = split.reason;
        ctx.emit_report("shadow_report.json", report);
        std::cout << "no certificate: " << split.reason << "\n"
                  << "exit: " << kExitInconclusive << "\n";
        ctx.emit_manifest("shadow", kExitInconclusive);
        return kExitInconclusive;
    }
    const GHCertificate& cert = *split.certificate;
    const DeltaForEps budget = delta_for_epsilon(
        cert, c.epsilon, c.grade,
        c.mode == ShadowRunMode::Periodic ? ShadowMode::Periodic : ShadowMode::Finite);

    std::vector<ShadowTrial> trials(ctx.seeds.size());
    run_trials(static_cast<std::int64_t>(ctx.seeds.size()), opts.jobs, [&](std::int64_t i) {
        ShadowTrial& trial = trials[static_cast<std::size_t>(i)];
        trial.seed = ctx.seeds[static_cast<std::size_t>(i)];
        Rng point_rng(trial.seed ^ 0x9e3779b97f4a7c15ull);
        const SeqVec x0 = random_unit_point(point_rng, c.window, c.fam, c.grade);
        Pseudotrajectory pt;
        switch (c.mode) {
            case ShadowRunMode::Finite:
                pt = make_chain(c.op, c.fam, x0, c.length, c.grade, budget.delta, trial.seed);
                break;
            case ShadowRunMode::Periodic:
                pt = make_cycle(c.op, c.fam, x0, c.length, c.grade, budget.delta, trial.seed);
                break;
            default:
                pt = make_two_sided(c.op, c.fam, x0, c.length, c.grade, budget.delta, trial.seed);
                break;
        }
        trial.validation = validate_pseudotrajectory(pt, c.op, c.fam);
        switch (c.mode) {
            case ShadowRunMode::Finite:
                trial.report = shadow_finite(pt, cert, c.op, c.fam);
                break;
            case ShadowRunMode::Periodic:
                trial.report = shadow_periodic(pt, cert, c.op, c.fam, c.tolerance);
                break;
            default:
                trial.report = shadow_two_sided(pt, cert, c.op, c.fam, c.tolerance);
                break;
        }
        trial.bounds_hold = trial.validation.ok &&
                            within_bound(trial.report.max_deviation, trial.report.bound_used);
        if (c.mode == ShadowRunMode::Periodic)
            trial.bounds_hold = trial.bounds_hold &&
                                within_bound(trial.report.periodic_residual,
                                             trial.report.residual_bound);
    });

    bool all_hold = true;
    std::vector<double> max_devs;
    json trial_rows = json::array();
    for (const ShadowTrial& trial : trials) {
        all_hold = all_hold && trial.bounds_hold;
        max_devs.push_back(trial.report.max_deviation);
        json row;
        row["seed"] = trial.seed;
        row["bounds_hold"] = trial.bounds_hold;
        row["validation"] = trial.validation;
        row["report"] = trial.report;
        trial_rows.push_back(std::move(row));
    }

    json report = report_header("shadow", ctx);
    report["mode"] = mode_name;
    report["grade"] = c.grade;
    report["epsilon"] = c.epsilon;
    report["delta"] = budget;
    report["certificate"] = cert;
    report["trials"] = std::move(trial_rows);
    json agg = aggregate_stats(max_devs);
    agg["all_bounds_hold"] = all_hold;
    report["aggregate"] = std::move(agg);
    ctx.emit_report("shadow_report.json", report);

    if (c.trace_csv) {
        std::string csv = "trial,step,deviation,bound\n";
        char buf[96];
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto& devs = trials[i].report.deviations;
            for (std::size_t r = 0; r < devs.size(); ++r) {
                std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", i, r, devs[r],
                              trials[i].report.bound_used);
                csv += buf;
            }
        }
        const std::string path = ctx.out_path("shadow_trace.csv");
        write_file(path, csv);
        std::cout << "trace: " << path << "\n";
    }

    const int code = all_hold ? kExitOk : kExitBoundViolation;
    std::cout << "mode: " << mode_name << "\n"
              << "trials: " << trials.size() << "\n"
              << "max_deviation: " << (max_devs.empty() ? 0.0 : *std::max_element(
                                                                    max_devs.begin(),
                                                                    max_devs.end()))
              << "\n"
              << "all_bounds_hold: " << (all_hold ? "true" : "false") << "\n"
              << "exit: " << code << "\n";
    ctx.emit_manifest("shadow", code);
    return code;
}

int shadow_counterexample(RunContext& ctx, const ShadowConfig& c) {
    const CounterexampleReport cx = counterexample_cycle(c.delta);
    const PseudoValidation validation =
        validate_pseudotrajectory(cx.cycle, LinearOp(cx.op), cx.fam);
    json report = report_header("shadow", ctx);
    report["mode"] = "counterexample";
    report["counterexample"] = cx;
    report["validation"] = validation;
    ctx.emit_report("shadow_report.json", report);
    // The failure is the expected mathematical result: exit 0 when the cycle
    // is a genuine delta-cycle that provably escapes every candidate orbit.
    const bool sound = validation.ok && cx.separation > 1.0;
    const int code = sound ? kExitOk : kExitBoundViolation;
    std::cout << "mode: counterexample\n"
              << "peak: " << cx.peak << "\n"
              << "separation: " << cx.separation << "\n"
              << "exit: " << code << "\n";
    ctx.emit_manifest("shadow", code);
    return code;
}

int shadow_adversarial(RunContext& ctx, const ShadowConfig& c) {
    const AdversarialChain chain = adversarial_mult_chain(*c.mult, c.delta, c.steps);
    json report = report_header("shadow", ctx);
    report["mode"] = "adversarial";
    report["chain"] = chain;
    ctx.emit_report("shadow_report.json", report);
    // Escape demonstrated -> expected negative result (exit 0); too few steps
    // to escape -> inconclusive.
    const int code = chain.escape_index >= 0 ? kExitOk : kExitInconclusive;
    std::cout << "mode: adversarial\n"
              << "escape_index: " << chain.escape_index << "\n"
              << "exit: " << code << "\n";
    ctx.emit_manifest("shadow", code);
    return code;
}

} // namespace

int cmd_shadow(const CliOptions& opts) {
    RunContext ctx = make_context(opts);
    const ExperimentConfig cfg = parse_experiment_config(ctx.config);
    if (cfg.command != "shadow") bad("config 'command' is not \"shadow\"");
    const auto& c = std::get<ShadowConfig>(cfg.body);
    ctx.seeds = resolve_seeds(c.seeds, opts);
    switch (c.mode) {
        case ShadowRunMode::Counterexample: return shadow_counterexample(ctx, c);
        case ShadowRunMode::Adversarial: return shadow_adversarial(ctx, c);
        default: return shadow_synthesis(ctx, c, opts);
    }
}

/// --- conjugacy ----------------------------------------------------------------------

namespace {

struct ConjugacyTrial {
    json seed;                 // number, or null for explicit points
    std::vector<double> residuals;
    std::vector<double> residual_bounds;
    std::vector<double> displacements;
    std::int64_t series_cutoff = 0;
    double max_residual = 0.0;
    bool bounds_hold = false;
};

ConjugacyTrial conjugacy_trial(const ConjugacyConfig& c, const PerturbedMap& S,
                               const GHCertificate& cert, const std::vector<SeqVec>& points) {
    ConjugacyTrial trial;
    std::vector<ConjugacyPoint> cps;
    cps.reserve(points.size());
    for (const SeqVec& x : points)
        cps.push_back(conjugacy_map(S, cert, x, c.fam, c.grade, c.tolerance));
    const auto phi = [&](const SeqVec& x) {
        return conjugacy_map(S, cert, x, c.fam, c.grade, c.tolerance).phi_x;
    };
    const SemiconjugacyReport semi = verify_semiconjugacy(c.op, S, phi, points, c.fam, c.grade);
    trial.residuals = semi.residuals;
    trial.max_residual = semi.max_residual;
    trial.bounds_hold = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        trial.residual_bounds.push_back(cps[i].residual_bound);
        trial.displacements.push_back(cps[i].displacement);
        trial.series_cutoff = std::max(trial.series_cutoff, cps[i].cutoff);
        trial.bounds_hold = trial.bounds_hold &&
                            within_bound(semi.residuals[i], cps[i].residual_bound) &&
                            within_bound(cps[i].displacement, c.epsilon);
    }
    return trial;
}

} // namespace

int cmd_conjugacy(const CliOptions& opts) {
    RunContext ctx = make_context(opts);
    const ExperimentConfig cfg = parse_experiment_config(ctx.config);
    if (cfg.command != "conjugacy") bad("config 'command' is not \"conjugacy\"");
    const auto& c = std::get<ConjugacyConfig>(cfg.body);
    ctx.seeds = resolve_seeds(c.seeds, opts);

    const SplitDetection split = detect_split(c.op, c.fam, {c.grade});
    if (!split.has_certificate()) {
        json report = report_header("conjugacy", ctx);
        report["certificate"] = nullptr;
        report["no_certificate_reason"] = split.reason;
        ctx.emit_report("conjugacy_report.json", report);
        std::cout << "no certificate: " << split.reason << "\n"
                  << "exit: " << kExitInconclusive << "\n";
        ctx.emit_manifest("conjugacy", kExitInconclusive);
        return kExitInconclusive;
    }
    const GHCertificate& cert = *split.certificate;

    // Admissibility gates: the fixed-point inversion needs the Lipschitz
    // contraction condition, and the displacement guarantee needs the
    // perturbation below the budget.  Both are properties of the config, so
    // failing either is bad input, not a bound violation.
    const double lip = perturbation_lipschitz(c.g);
    const double back = op_norm_bound(op_inverse(c.op), c.fam, c.grade);
    if (lip > 0.0 && !(lip * back < 1.0)) {
        json report = report_header("conjugacy", ctx);
        report["contraction_condition"] = {{"inverse_bound", back},
                                           {"lipschitz", lip},
                                           {"product", lip * back},
                                           {"required", "product < 1"}};
        report["error"] = "perturbation is not admissible: the Lipschitz contraction "
                          "condition fails, so the perturbed map need not be invertible";
        ctx.emit_report("conjugacy_report.json", report);
        std::cout << "inadmissible perturbation: lipschitz " << lip << " * inverse bound "
                  << back << " >= 1\n"
                  << "exit: " << kExitBadInput << "\n";
        ctx.emit_manifest("conjugacy", kExitBadInput);
        return kExitBadInput;
    }
    const double delta = conjugacy_delta(cert, c.epsilon, c.grade);
    const double bound = perturbation_bound(c.g, c.fam, c.grade);
    if (!(bound < delta)) {
        json report = report_header("conjugacy", ctx);
        report["delta"] = delta;
        report["epsilon"] = c.epsilon;
        report["perturbation_bound"] = bound;
        report["error"] = "perturbation exceeds the admissible budget for the requested "
                          "displacement bound";
        ctx.emit_report("conjugacy_report.json", report);
        std::cout << "perturbation bound " << bound << " >= budget " << delta << "\n"
                  << "exit: " << kExitBadInput << "\n";
        ctx.emit_manifest("conjugacy", kExitBadInput);
        return kExitBadInput;
    }

    const PerturbedMap S{c.op, c.g};
    std::vector<ConjugacyTrial> trials;
    if (!c.points.empty()) {
        ConjugacyTrial trial = conjugacy_trial(c, S, cert, c.points);
        trial.seed = nullptr;
        trials.push_back(std::move(trial));
    } else {
        trials.resize(ctx.seeds.size());
        run_trials(static_cast<std::int64_t>(ctx.seeds.size()), opts.jobs, [&](std::int64_t i) {
            const std::uint64_t seed = ctx.seeds[static_cast<std::size_t>(i)];
            Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
            std::vector<SeqVec> points;
            points.reserve(static_cast<std::size_t>(c.samples));
            for (std::int64_t s = 0; s < c.samples; ++s)
                points.push_back(random_unit_point(rng, c.window, c.fam, c.grade));
            ConjugacyTrial trial = conjugacy_trial(c, S, cert, points);
            trial.seed = seed;
            trials[static_cast<std::size_t>(i)] = std::move(trial);
        });
    }

    bool all_hold = true;
    std::vector<double> residuals_all;
    std::int64_t cutoff_max = 0;
    double max_displacement = 0.0;
    json trial_rows = json::array();
    for (const ConjugacyTrial& trial : trials) {
        all_hold = all_hold && trial.bounds_hold;
        residuals_all.insert(residuals_all.end(), trial.residuals.begin(),
                             trial.residuals.end());
        cutoff_max = std::max(cutoff_max, trial.series_cutoff);
        for (const double d : trial.displacements) max_displacement = std::max(max_displacement, d);
        json row;
        row["seed"] = trial.seed;
        row["points"] = trial.residuals.size();
        row["series_cutoff"] = trial.series_cutoff;
        row["residuals"] = trial.residuals;
        row["residual_bounds"] = trial.residual_bounds;
        row["displacements"] = trial.displacements;
        row["max_residual"] = trial.max_residual;
        row["bounds_hold"] = trial.bounds_hold;
        trial_rows.push_back(std::move(row));
    }

    json report = report_header("conjugacy", ctx);
    report["certificate"] = cert;
    report["grade"] = c.grade;
    report["epsilon"] = c.epsilon;
    report["delta"] = delta;
    report["perturbation_bound"] = bound;
    report["tolerance"] = c.tolerance;
    report["trials"] = std::move(trial_rows);
    json agg = aggregate_stats(residuals_all);
    agg["all_bounds_hold"] = all_hold;
    agg["max_displacement"] = max_displacement;
    report["aggregate"] = std::move(agg);
    ctx.emit_report("conjugacy_report.json", report);

    const int code = all_hold ? kExitOk : kExitBoundViolation;
    std::cout << "max_residual: "
              << (residuals_all.empty()
                      ? 0.0
                      : *std::max_element(residuals_all.begin(), residuals_all.end()))
              << "\n"
              << "series_cutoff: " << cutoff_max << "\n"
              << "all_bounds_hold: " << (all_hold ? "true" : "false") << "\n"
              << "exit: " << code << "\n";

    json extra;
    extra["operator"] = c.op;
    extra["perturbation"] = c.g;
    extra["tolerance"] = c.tolerance;
    extra["series_cutoff"] = cutoff_max;
    extra["residuals"] = residuals_all;
    ctx.emit_manifest("conjugacy", code, extra);
    return code;
}

/// --- validate -----------------------------------------------------------------------

int cmd_validate(const CliOptions& opts) {
    RunContext ctx = make_context(opts);
    ctx.seeds = resolve_seeds({}, opts);
    json report = report_header("validate", ctx);
    int code = kExitOk;
    std::string target = "unknown";
    try {
        const ExperimentConfig cfg = parse_experiment_config(ctx.config);
        target = cfg.command;
        report["target_command"] = cfg.command;
        if (const auto* check = std::get_if<PseudoCheckConfig>(&cfg.body)) {
            const PseudoValidation v = validate_pseudotrajectory(check->pt, check->op, check->fam);
            report["pseudo_check"] = v;
            report["valid"] = v.ok;
            report["message"] = v.ok ? "pseudotrajectory is structurally valid" : v.message;
            code = v.ok ? kExitOk : kExitBadInput;
        } else {
            report["pseudo_check"] = nullptr;
            report["valid"] = true;
            report["message"] = "config is schema-valid";
        }
    } catch (const ConfigError& e) {
        report["target_command"] = target;
        report["pseudo_check"] = nullptr;
        report["valid"] = false;
        report["message"] = e.what();
        code = kExitBadInput;
    }
    ctx.emit_report("validate_report.json", report);
    std::cout << "valid: " << (code == kExitOk ? "true" : "false") << "\n"
              << "exit: " << code << "\n";
    ctx.emit_manifest("validate", code);
    return code;
}

/// --- dispatch -----------------------------------------------------------------------

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    if (!j.is_object()) bad("config: expected a JSON object");
    if (!j.contains("command")) bad("config: missing key 'command'");
    if (!j.at("command").is_string()) bad("config: 'command' must be a string");
    ExperimentConfig cfg;
    cfg.command = j.at("command").get<std::string>();
    if (cfg.command == "classify") {
        cfg.body = parse_classify(j);
    } else if (cfg.command == "shadow") {
        cfg.body = parse_shadow(j);
    } else if (cfg.command == "conjugacy") {
        cfg.body = parse_conjugacy(j);
    } else if (cfg.command == "validate") {
        cfg.body = parse_pseudo_check(j);
    } else {
        bad("config: unknown command '" + cfg.command + "'");
    }
    return cfg;
}

int run_cli(const std::string& command, const CliOptions& opts) {
    try {
        if (command == "classify") return cmd_classify(opts);
        if (command == "shadow") return cmd_shadow(opts);
        if (command == "conjugacy") return cmd_conjugacy(opts);
        if (command == "validate") return cmd_validate(opts);
        std::cerr << "error: unknown command '" << command << "'\n";
        return kExitBadInput;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconclusive;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconclusive;
    }
}

} // namespace shadowlab
