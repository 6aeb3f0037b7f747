// Python extension module.  Every structured argument and result is a plain
// JSON-shaped dict/list using the same schemas as the command-line tool's
// config and report files, so the two surfaces cannot drift apart.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/cli.hpp"
#include "shadowlab/errors.hpp"

namespace py = pybind11;
using namespace shadowlab;
using nlohmann::json;

namespace {

json from_py(const py::handle& obj) {
    const py::module_ pyjson = py::module_::import("json");
    return json::parse(py::cast<std::string>(pyjson.attr("dumps")(obj)));
}

py::object to_py(const json& j) {
    const py::module_ pyjson = py::module_::import("json");
    return pyjson.attr("loads")(j.dump());
}

template <typename T>
T parse_as(const py::handle& obj) {
    return from_py(obj).get<T>();
}

ShadowMode parse_mode(const std::string& mode) {
    if (mode == "finite") return ShadowMode::Finite;
    if (mode == "periodic") return ShadowMode::Periodic;
    throw ConfigError("mode must be 'finite' or 'periodic', got '" + mode + "'");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weighted shifts on graded sequence spaces: splitting certificates, "
              "shadowing bounds, expansivity verdicts, and conjugacy maps.  All "
              "structured values are JSON-shaped dicts matching the CLI file formats.";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<OverflowError>(m, "OverflowGuardError", PyExc_OverflowError);

    // --- spaces and operators ----------------------------------------------

    m.def(
        "seminorm",
        [](const py::handle& space, int grade, const py::handle& x) {
            return seminorm_eval(parse_as<SeminormFamily>(space), grade, parse_as<SeqVec>(x));
        },
        py::arg("space"), py::arg("grade"), py::arg("x"),
        "Grade-`grade` seminorm of the vector `x` in the given space.");

    m.def(
        "apply",
        [](const py::handle& op, const py::handle& x) {
            return to_py(json(op_apply(parse_as<LinearOp>(op), parse_as<SeqVec>(x))));
        },
        py::arg("op"), py::arg("x"), "Apply a linear operator to a vector.");

    m.def(
        "inverse",
        [](const py::handle& op) { return to_py(json(op_inverse(parse_as<LinearOp>(op)))); },
        py::arg("op"), "Inverse of an invertible linear operator.");

    // --- splittings and budgets ----------------------------------------------

    m.def(
        "detect_split",
        [](const py::handle& op, const py::handle& space, const std::vector<int>& grades) {
            return to_py(json(
                detect_split(parse_as<LinearOp>(op), parse_as<SeminormFamily>(space), grades)));
        },
        py::arg("op"), py::arg("space"), py::arg("grades"),
        "Detect a contracting/expanding splitting; the result carries either a "
        "certificate with per-grade constants or a refusal reason.");

    m.def(
        "delta_for_epsilon",
        [](const py::handle& certificate, double epsilon, int grade, const std::string& mode) {
            return to_py(json(delta_for_epsilon(parse_as<GHCertificate>(certificate), epsilon,
                                                grade, parse_mode(mode))));
        },
        py::arg("certificate"), py::arg("epsilon"), py::arg("grade"), py::arg("mode") = "finite",
        "Defect budget delta = (1 - t) eps / (3 c d) guaranteeing eps-shadowing.");

    // --- pseudotrajectories and shadowing --------------------------------------

    m.def(
        "make_chain",
        [](const py::handle& op, const py::handle& space, const py::handle& x0,
           std::int64_t length, int grade, double delta, std::uint64_t seed) {
            return to_py(json(make_chain(parse_as<LinearOp>(op), parse_as<SeminormFamily>(space),
                                         parse_as<SeqVec>(x0), length, grade, delta, seed)));
        },
        py::arg("op"), py::arg("space"), py::arg("x0"), py::arg("length"), py::arg("grade"),
        py::arg("delta"), py::arg("seed"), "Seeded random delta-chain from x0.");

    m.def(
        "make_cycle",
        [](const py::handle& op, const py::handle& space, const py::handle& x0,
           std::int64_t period, int grade, double delta, std::uint64_t seed) {
            return to_py(json(make_cycle(parse_as<LinearOp>(op), parse_as<SeminormFamily>(space),
                                         parse_as<SeqVec>(x0), period, grade, delta, seed)));
        },
        py::arg("op"), py::arg("space"), py::arg("x0"), py::arg("period"), py::arg("grade"),
        py::arg("delta"), py::arg("seed"), "Seeded random delta-cycle of the given period.");

    m.def(
        "validate_pseudotrajectory",
        [](const py::handle& pt, const py::handle& op, const py::handle& space) {
            return to_py(json(validate_pseudotrajectory(parse_as<Pseudotrajectory>(pt),
                                                        parse_as<LinearOp>(op),
                                                        parse_as<SeminormFamily>(space))));
        },
        py::arg("pseudotrajectory"), py::arg("op"), py::arg("space"),
        "Structural check of a pseudotrajectory: cached defects and budget.");

    m.def(
        "shadow_finite",
        [](const py::handle& pt, const py::handle& certificate, const py::handle& op,
           const py::handle& space) {
            return to_py(json(shadow_finite(parse_as<Pseudotrajectory>(pt),
                                            parse_as<GHCertificate>(certificate),
                                            parse_as<LinearOp>(op),
                                            parse_as<SeminormFamily>(space))));
        },
        py::arg("pseudotrajectory"), py::arg("certificate"), py::arg("op"), py::arg("space"),
        "Shadow a finite chain; the report carries per-point deviations and the "
        "analytic deviation budget.");

    m.def(
        "shadow_periodic",
        [](const py::handle& pt, const py::handle& certificate, const py::handle& op,
           const py::handle& space, double tol) {
            return to_py(json(shadow_periodic(parse_as<Pseudotrajectory>(pt),
                                              parse_as<GHCertificate>(certificate),
                                              parse_as<LinearOp>(op),
                                              parse_as<SeminormFamily>(space), tol)));
        },
        py::arg("pseudotrajectory"), py::arg("certificate"), py::arg("op"), py::arg("space"),
        py::arg("tol") = 1e-12,
        "Shadow a delta-cycle by an approximately periodic point; the report "
        "carries the closing residual and its analytic cap.");

    m.def(
        "counterexample_cycle", [](double delta) { return to_py(json(counterexample_cycle(delta))); },
        py::arg("delta"),
        "A delta-cycle no genuine orbit shadows, with the separation argument.");

    m.def(
        "adversarial_chain",
        [](const py::handle& op, double delta, std::int64_t steps) {
            return to_py(json(
                adversarial_mult_chain(parse_as<MultiplicationOperator>(op), delta, steps)));
        },
        py::arg("op"), py::arg("delta"), py::arg("steps"),
        "Pseudotrajectory of a marked multiplication operator whose values escape "
        "every bounded set despite constant-size defects.");

    // --- expansivity --------------------------------------------------------------

    m.def(
        "classify_expansivity",
        [](const py::handle& op, const py::handle& space, const std::vector<int>& grades,
           std::int64_t horizon) {
            const LinearOp parsed = parse_as<LinearOp>(op);
            const auto* shift = std::get_if<ShiftOperator>(&parsed);
            if (shift == nullptr) {
                throw ConfigError("expansivity classification expects a shift operator");
            }
            return to_py(json(
                classify_expansivity_shift(*shift, parse_as<SeminormFamily>(space), grades,
                                           horizon)));
        },
        py::arg("op"), py::arg("space"), py::arg("grades"), py::arg("horizon") = 2000,
        "Positive-expansivity verdict for a weighted shift, with per-grade branch "
        "evidence and an analytic/horizon-only confidence flag.");

    m.def(
        "orbit_scan",
        [](const py::handle& op, const py::handle& space, int grade, const py::handle& x,
           int direction, std::int64_t steps) {
            return to_py(json(orbit_scan(parse_as<LinearOp>(op), parse_as<SeminormFamily>(space),
                                         grade, parse_as<SeqVec>(x), direction, steps,
                                         std::nullopt)));
        },
        py::arg("op"), py::arg("space"), py::arg("grade"), py::arg("x"), py::arg("direction") = 1,
        py::arg("steps") = 100, "Seminorms along one orbit direction of x.");

    m.def(
        "uniform_witness",
        [](const py::handle& op, const py::handle& space, const py::handle& samples, int grade,
           int n, const py::handle& certificate) {
            std::optional<GHCertificate> cert;
            if (!certificate.is_none()) cert = parse_as<GHCertificate>(certificate);
            std::vector<SeqVec> parsed;
            for (const py::handle& s : samples) parsed.push_back(parse_as<SeqVec>(s));
            return to_py(json(uniform_expansivity_witness(cert, parse_as<LinearOp>(op),
                                                          parse_as<SeminormFamily>(space), parsed,
                                                          grade, n)));
        },
        py::arg("op"), py::arg("space"), py::arg("samples"), py::arg("grade"), py::arg("n"),
        py::arg("certificate") = py::none(),
        "Unit-sphere growth witness: every sample must beat the n-step lower bound.");

    // --- conjugacies ---------------------------------------------------------------

    m.def(
        "conjugacy_delta",
        [](const py::handle& certificate, double epsilon, int grade) {
            return conjugacy_delta(parse_as<GHCertificate>(certificate), epsilon, grade);
        },
        py::arg("certificate"), py::arg("epsilon"), py::arg("grade"),
        "Largest sup||g|| keeping the conjugacy displacement below epsilon.");

    m.def(
        "conjugacy_point",
        [](const py::handle& op, const py::handle& space, int grade,
           const py::handle& perturbation, const py::handle& x, double tol) {
            const LinearOp base = parse_as<LinearOp>(op);
            const SeminormFamily fam = parse_as<SeminormFamily>(space);
            const SplitDetection det = detect_split(base, fam, {grade});
            if (!det.has_certificate()) {
                throw ConfigError("no splitting certificate: " + det.reason);
            }
            const PerturbedMap S{base, parse_as<Perturbation>(perturbation)};
            return to_py(json(
                conjugacy_map(S, *det.certificate, parse_as<SeqVec>(x), fam, grade, tol)));
        },
        py::arg("op"), py::arg("space"), py::arg("grade"), py::arg("perturbation"), py::arg("x"),
        py::arg("tol") = 1e-10,
        "phi(x) for the map conjugating op to op + g, with displacement and "
        "truncation bounds.");

    m.def(
        "radial_homeo",
        [](const py::handle& center, double radius, const py::handle& space, int grade,
           const py::handle& a, const py::handle& b) {
            return to_py(json(radial_homeo(parse_as<SeqVec>(center), radius,
                                           parse_as<SeminormFamily>(space), grade,
                                           parse_as<SeqVec>(a), parse_as<SeqVec>(b))));
        },
        py::arg("center"), py::arg("radius"), py::arg("space"), py::arg("grade"), py::arg("a"),
        py::arg("b"),
        "Homeomorphism sending a to b, identity outside the ball around center.");

    m.def(
        "radial_homeo_apply",
        [](const py::handle& h, const py::handle& x) {
            return to_py(json(radial_homeo_apply(parse_as<BallHomeo>(h), parse_as<SeqVec>(x))));
        },
        py::arg("h"), py::arg("x"), "Apply a ball homeomorphism.");

    m.def(
        "radial_homeo_inverse",
        [](const py::handle& h, const py::handle& y) {
            return to_py(
                json(radial_homeo_inverse_apply(parse_as<BallHomeo>(h), parse_as<SeqVec>(y))));
        },
        py::arg("h"), py::arg("y"), "Apply the inverse of a ball homeomorphism.");

    // --- tool entry points ------------------------------------------------------------

    m.def(
        "run",
        [](const std::string& command, const std::string& config_path, const std::string& out_dir,
           const py::handle& seed, int jobs) {
            CliOptions opts;
            opts.config_path = config_path;
            opts.out_dir = out_dir;
            if (!seed.is_none()) opts.seed_override = py::cast<std::uint64_t>(seed);
            opts.jobs = jobs;
            return run_cli(command, opts);
        },
        py::arg("command"), py::arg("config_path"), py::arg("out_dir") = ".",
        py::arg("seed") = py::none(), py::arg("jobs") = 1,
        "Run a tool subcommand (classify / shadow / conjugacy / validate) on a "
        "config file; returns the exit code and writes report + manifest files.");

    m.def(
        "canonical_dump", [](const py::handle& obj) { return canonical_dump(from_py(obj)); },
        py::arg("obj"), "Canonical JSON serialization (sorted keys, two-space indent).");

    m.def(
        "config_hash", [](const std::string& text) { return hex64(fnv1a64(text)); },
        py::arg("text"), "Hash of a config file's bytes as used in run manifests.");
}
