#include <doctest.h>

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shadowlab/errors.hpp"
#include "shadowlab/serialize.hpp"

using namespace shadowlab;
using nlohmann::json;

namespace {

template <class T>
T roundtrip(const T& v) {
    const json j = v;
    return j.template get<T>();
}

// Encoding, decoding and re-encoding must reproduce the exact byte stream:
// keys are emitted in sorted order and doubles print in shortest-roundtrip
// form, so equal data implies equal dumps.
template <class T>
void check_redump_stable(const T& v) {
    const json first = v;
    const T back = first.template get<T>();
    const json second = back;
    CHECK(first.dump() == second.dump());
}

// Every object encoding rejects both an added stray key and a removed one.
template <class T>
void check_strict_shape(const T& v) {
    const json base = v;
    json extra = base;
    extra["unexpected_key"] = 1;
    CHECK_THROWS_AS((void)extra.template get<T>(), ConfigError);
    json missing = base;
    missing.erase(missing.begin().key());
    CHECK_THROWS_AS((void)missing.template get<T>(), ConfigError);
}

SeqVec sample_vec() {
    SeqVec v(IndexWindow(-8, 8));
    v.set(-2, 0.5);
    v.set(4, -1.25);
    return v;
}

ShiftOperator split_shift(double a) {
    return make_forward_shift(
        WeightSequence({}, TailRule::constant(1.0 / a), TailRule::constant(a)));
}

} // namespace

TEST_CASE("windows and vectors have pinned pair-array encodings") {
    const IndexWindow w(-3, 7);
    CHECK(json(w).dump() == R"({"hi":7,"lo":-3})");
    CHECK(roundtrip(w) == w);

    const SeqVec v = sample_vec();
    CHECK(json(v).dump() ==
          R"({"coeffs":[[-2,0.5],[4,-1.25]],"window":{"hi":8,"lo":-8}})");
    CHECK(roundtrip(v) == v);
    CHECK(roundtrip(SeqVec{}) == SeqVec{});

    check_strict_shape(w);
    check_strict_shape(v);
    // Structural checks come from the parser; value checks from the types.
    CHECK_THROWS_AS((void)json::parse(R"({"lo":"a","hi":7})").get<IndexWindow>(),
                    ConfigError);
    CHECK_THROWS_AS((void)json::parse(R"({"lo":3,"hi":1})").get<IndexWindow>(),
                    PreconditionError);
    CHECK_THROWS_AS(
        (void)json::parse(
            R"({"coeffs":[[30,1.0]],"window":{"hi":8,"lo":-8}})")
            .get<SeqVec>(),
        PreconditionError);
}

TEST_CASE("non-finite reals ride as strings and return intact") {
    const double inf = std::numeric_limits<double>::infinity();
    GradeConstants g;
    g.beta = 2;
    g.c = inf;
    g.t = 0.5;
    CHECK(json(g).dump() == R"({"beta":2,"c":"inf","t":0.5})");
    const GradeConstants back = roundtrip(g);
    CHECK(std::isinf(back.c));
    CHECK(back.t == 0.5);

    g.c = -inf;
    CHECK(std::isinf(roundtrip(g).c));
    CHECK(roundtrip(g).c < 0.0);
    g.c = std::numeric_limits<double>::quiet_NaN();
    CHECK(std::isnan(roundtrip(g).c));

    // Only the three sanctioned spellings parse as reals.
    CHECK_THROWS_AS(
        (void)json::parse(R"({"beta":2,"c":"huge","t":0.5})").get<GradeConstants>(),
        ConfigError);
    // Fields documented as finite refuse even the sanctioned spellings.
    CHECK_THROWS_AS(
        (void)json::parse(
            R"({"center":{"coeffs":[],"window":{"hi":0,"lo":0}},"inverted":false,)"
            R"("k":1,"phi_mid":1.5,"radius":"inf","u_mid":1.2})")
            .get<RadialStage>(),
        ConfigError);
}

TEST_CASE("tail rules and weight sequences roundtrip") {
    const TailRule c = TailRule::constant(2.5);
    CHECK(json(c).dump() == R"({"kind":"constant","value":2.5})");
    CHECK(roundtrip(c) == c);

    const TailRule p = TailRule::power_law(1.5, false);
    CHECK(json(p).dump() ==
          R"({"exponent":1.5,"kind":"power_law","positive_sign":false})");
    CHECK(roundtrip(p) == p);

    CHECK_THROWS_AS(
        (void)json::parse(R"({"kind":"constant","value":0.0})").get<TailRule>(),
        ConfigError);
    CHECK_THROWS_AS(
        (void)json::parse(R"({"exponent":-1.0,"kind":"power_law","positive_sign":true})")
            .get<TailRule>(),
        ConfigError);
    CHECK_THROWS_AS((void)json::parse(R"({"kind":"geometric"})").get<TailRule>(),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)json::parse(R"({"exponent":1.0,"kind":"power_law"})").get<TailRule>(),
        ConfigError);

    const WeightSequence w({{-1, 3.0}, {2, 0.25}}, TailRule::constant(1.0),
                           TailRule::power_law(1.5, true));
    CHECK(roundtrip(w) == w);
    check_redump_stable(w);
    // The weight constructor still vets parsed values.
    json bad = json(w);
    bad["table"] = json::array({json::array({0, 0.0})});
    CHECK_THROWS_AS((void)bad.get<WeightSequence>(), PreconditionError);
}

TEST_CASE("grade matrices and seminorm families cover every kind") {
    const std::vector<KotheMatrix> matrices = {
        KotheMatrix::constant(2.0),
        KotheMatrix::polynomial_grade(),
        KotheMatrix::band_indicator({{1, 2}, {3, 10}}),
        KotheMatrix::table(IndexWindow(-2, 2), {{1, {{-1, 0.5}, {0, 1.0}}}}),
        KotheMatrix::weighted_constant(
            WeightSequence({}, TailRule::constant(1.0), TailRule::constant(2.0)))};
    for (const KotheMatrix& m : matrices) {
        CHECK(roundtrip(m) == m);
        check_redump_stable(m);
    }
    CHECK_THROWS_AS((void)json::parse(R"({"kind":"polynomial_grade","p":1.0})")
                        .get<KotheMatrix>(),
                    ConfigError);
    CHECK_THROWS_AS((void)json::parse(R"({"kind":"fractal"})").get<KotheMatrix>(),
                    ConfigError);

    const std::vector<SeminormFamily> families = {
        SeminormFamily::lp(1.0), SeminormFamily::lp(2.0), SeminormFamily::c0(),
        SeminormFamily::rapid_decrease(), SeminormFamily::omega_product(),
        SeminormFamily::kothe(KotheMatrix::polynomial_grade(), 1.0)};
    for (const SeminormFamily& f : families) {
        CHECK(roundtrip(f) == f);
        check_redump_stable(f);
    }
    // A reconstructed family measures exactly like the original.
    const SeqVec v = sample_vec();
    for (const SeminormFamily& f : families)
        CHECK(seminorm_eval(roundtrip(f), 2, v) == seminorm_eval(f, 2, v));

    CHECK_THROWS_AS((void)json::parse(R"({"kind":"lp"})").get<SeminormFamily>(),
                    ConfigError);
    CHECK_THROWS_AS((void)json::parse(R"({"kind":"sobolev"})").get<SeminormFamily>(),
                    ConfigError);
}

TEST_CASE("linear operators keep their kind tag flat") {
    const ShiftOperator shift = split_shift(0.25);
    CHECK(roundtrip(shift) == shift);
    check_strict_shape(shift);

    const LinearOp as_var{shift};
    const json j = as_var;
    CHECK(j.at("kind") == "shift");
    CHECK(j.contains("direction"));
    const LinearOp back = roundtrip(as_var);
    REQUIRE(std::holds_alternative<ShiftOperator>(back));
    CHECK(std::get<ShiftOperator>(back) == shift);

    const LinearOp scalar{ScalarOperator{-1.75}};
    CHECK(json(scalar).dump() == R"({"kind":"scalar","lambda":-1.75})");
    REQUIRE(std::holds_alternative<ScalarOperator>(roundtrip(scalar)));
    CHECK(std::get<ScalarOperator>(roundtrip(scalar)).lambda == -1.75);

    CHECK_THROWS_AS((void)json::parse(R"({"kind":"diagonal"})").get<LinearOp>(),
                    ConfigError);
    CHECK_THROWS_AS((void)json::parse(R"({"kind":"scalar","lambda":0.0})").get<LinearOp>(),
                    ConfigError);
    json bad = json(shift);
    bad["direction"] = "sideways";
    CHECK_THROWS_AS((void)bad.get<ShiftOperator>(), ConfigError);

    MultiplicationOperator mult;
    mult.sites = {"a", "b", "c"};
    mult.modulus = {0.5, 1.0, 2.0};
    mult.marked_site = 1;
    mult.marked_phase = -1.0;
    mult.compacts = {{"K1", {0, 2}}, {"K2", {1}}};
    check_redump_stable(mult);
    const MultiplicationOperator mback = roundtrip(mult);
    CHECK(mback.sites == mult.sites);
    CHECK(mback.marked_site == mult.marked_site);
    CHECK(mback.compacts == mult.compacts);

    mult.marked_site.reset();
    mult.marked_phase = 1.0;
    CHECK(json(mult).at("marked_site").is_null());
    CHECK_FALSE(roundtrip(mult).marked_site.has_value());

    // Parsing revalidates the structure, not just the shape.
    json invalid = json(mult);
    invalid["compacts"] = json::array({json::array({"K", json::array({7})})});
    CHECK_THROWS_AS((void)invalid.get<MultiplicationOperator>(), PreconditionError);
}

TEST_CASE("grade condition and compact verdicts roundtrip") {
    GradeConditionVerdict v;
    v.grade = 2;
    v.status = GradeConditionStatus::Witnessed;
    v.witness_m = 3;
    v.sup_estimate = 1.0;
    v.analytic = true;
    v.note = "ratio certified";
    check_redump_stable(v);
    CHECK(json(v).at("status") == "witnessed");
    const GradeConditionVerdict vb = roundtrip(v);
    CHECK(vb.status == GradeConditionStatus::Witnessed);
    CHECK(vb.witness_m == 3);
    CHECK(vb.note == "ratio certified");
    check_strict_shape(v);

    v.status = GradeConditionStatus::NoWitnessUpToMaxGrade;
    CHECK(json(v).at("status") == "no_witness_up_to_max_grade");
    CHECK(roundtrip(v).status == GradeConditionStatus::NoWitnessUpToMaxGrade);
    json bad = json(v);
    bad["status"] = "undecided";
    CHECK_THROWS_AS((void)bad.get<GradeConditionVerdict>(), ConfigError);

    GradeConditionReport rep;
    rep.per_grade = {v};
    rep.all_witnessed = false;
    check_redump_stable(rep);
    CHECK(roundtrip(rep).per_grade.size() == 1);

    MultiplicationOperator mult;
    mult.sites = {"a", "b", "c", "d"};
    mult.modulus = {0.25, 4.0, 1.0, 0.5};
    mult.marked_site = 2;
    mult.compacts = {{"hyp", {0, 1, 3}}, {"mixed", {0, 2}}};
    for (const CompactVerdict& cv : classify_multiplication(mult)) {
        check_redump_stable(cv);
        const CompactVerdict cvb = roundtrip(cv);
        CHECK(cvb.name == cv.name);
        CHECK(cvb.hyperbolic == cv.hyperbolic);
        CHECK(cvb.failing_sites == cv.failing_sites);
    }
}

TEST_CASE("splitting certificates and budgets roundtrip exactly") {
    const SplitDetection det =
        detect_split(split_shift(0.25), SeminormFamily::rapid_decrease(), {1, 2});
    REQUIRE(det.has_certificate());
    CHECK(roundtrip(*det.certificate) == *det.certificate);
    check_redump_stable(det);
    const SplitDetection dback = roundtrip(det);
    REQUIRE(dback.certificate.has_value());
    CHECK(*dback.certificate == *det.certificate);

    // Refusals carry a null certificate plus the reason string.
    const SplitDetection refusal = detect_split(
        make_forward_shift(
            WeightSequence({}, TailRule::constant(1.0), TailRule::constant(1.0))),
        SeminormFamily::lp(2.0), {1});
    REQUIRE_FALSE(refusal.has_certificate());
    CHECK(json(refusal).at("certificate").is_null());
    const SplitDetection rback = roundtrip(refusal);
    CHECK_FALSE(rback.certificate.has_value());
    CHECK(rback.reason == refusal.reason);

    const DeltaForEps budget =
        delta_for_epsilon(*det.certificate, 0.1, 2, ShadowMode::Finite);
    const DeltaForEps bback = roundtrip(budget);
    CHECK(bback.delta == budget.delta); // bitwise: numbers reparse exactly
    CHECK(bback.input_grade == budget.input_grade);
    CHECK(bback.c == budget.c);
    check_strict_shape(budget);

    json bad = json(*det.certificate);
    bad["orientation"] = "diagonal_contracts";
    CHECK_THROWS_AS((void)bad.get<GHCertificate>(), ConfigError);
}

TEST_CASE("expansivity artifacts roundtrip") {
    const ExpansivityVerdict verdict = classify_expansivity_shift(
        make_forward_shift(
            WeightSequence({}, TailRule::constant(0.5), TailRule::constant(0.5))),
        SeminormFamily::lp(2.0), {1, 2}, 50);
    CHECK(json(verdict).at("kind") == "positively_expansive_inverse");
    check_redump_stable(verdict);
    const ExpansivityVerdict vback = roundtrip(verdict);
    CHECK(vback.kind == verdict.kind);
    CHECK(vback.confidence == verdict.confidence);
    CHECK(vback.evidence.size() == verdict.evidence.size());
    json bad = json(verdict);
    bad["kind"] = "sideways_expansive";
    CHECK_THROWS_AS((void)bad.get<ExpansivityVerdict>(), ConfigError);

    const ShiftOperator contraction = make_forward_shift(
        WeightSequence({}, TailRule::constant(0.5), TailRule::constant(0.5)));
    const SplitDetection det =
        detect_split(contraction, SeminormFamily::lp(2.0), {1});
    REQUIRE(det.has_certificate());
    const std::vector<SeqVec> samples = {unit_vector(0, IndexWindow(-4, 4)),
                                         unit_vector(2, IndexWindow(-4, 4))};
    const WitnessReport wit = uniform_expansivity_witness(
        det.certificate, LinearOp{contraction}, SeminormFamily::lp(2.0), samples, 1, 5);
    check_redump_stable(wit);
    const WitnessReport wback = roundtrip(wit);
    CHECK(wback.route == wit.route);
    CHECK(wback.samples.size() == wit.samples.size());
    if (!wit.samples.empty()) {
        CHECK(wback.samples[0].observed == wit.samples[0].observed);
        check_strict_shape(wit.samples[0]);
    }

    const DoublingResult dbl = orbit_doubling_check(
        LinearOp{ScalarOperator{2.0}}, unit_vector(0, IndexWindow(-2, 2)),
        SeminormFamily::lp(2.0), 1, 10);
    check_redump_stable(dbl);
    CHECK(roundtrip(dbl).n == dbl.n);

    OrbitScanResult scan;
    scan.values = {1.0, std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::quiet_NaN()};
    scan.steps_completed = 2;
    scan.stopped_at_bound = true;
    scan.truncated_overflow = false;
    const std::string dumped = json(scan).dump();
    CHECK(dumped.find("\"inf\"") != std::string::npos);
    CHECK(dumped.find("\"nan\"") != std::string::npos);
    const OrbitScanResult sback = roundtrip(scan);
    REQUIRE(sback.values.size() == 3);
    CHECK(sback.values[0] == 1.0);
    CHECK(std::isinf(sback.values[1]));
    CHECK(std::isnan(sback.values[2]));
}

TEST_CASE("shadowing artifacts roundtrip") {
    const ShiftOperator op = split_shift(0.25);
    const SeminormFamily fam = SeminormFamily::rapid_decrease();
    const Pseudotrajectory chain =
        make_chain(op, fam, unit_vector(0, IndexWindow(-16, 16)), 4, 2, 0.01, 7);
    check_redump_stable(chain);
    const Pseudotrajectory cback = roundtrip(chain);
    REQUIRE(cback.points.size() == chain.points.size());
    for (std::size_t i = 0; i < chain.points.size(); ++i)
        CHECK(cback.points[i] == chain.points[i]); // numbers reparse bitwise
    CHECK(cback.delta == chain.delta);
    check_strict_shape(chain);

    const PseudoValidation val = validate_pseudotrajectory(chain, op, fam);
    check_redump_stable(val);
    CHECK(roundtrip(val).ok == val.ok);

    const SplitDetection det = detect_split(op, fam, {2});
    REQUIRE(det.has_certificate());
    const ShadowReport rep = shadow_finite(chain, *det.certificate, op, fam);
    check_redump_stable(rep);
    const ShadowReport rback = roundtrip(rep);
    CHECK(rback.shadow_point == rep.shadow_point);
    CHECK(rback.bound_used == rep.bound_used);
    CHECK(rback.series_terms == rep.series_terms);
    check_strict_shape(rep);

    const VerifyResult ver = verify_shadowing(chain, chain.points[0], op, fam, 2);
    check_redump_stable(ver);
    CHECK(roundtrip(ver).defects_consistent == ver.defects_consistent);

    const CounterexampleReport cex = counterexample_cycle(0.5);
    check_redump_stable(cex);
    const CounterexampleReport xback = roundtrip(cex);
    CHECK(xback.n == cex.n);
    CHECK(xback.peak == cex.peak);
    CHECK(xback.cycle.points.size() == cex.cycle.points.size());
    CHECK(xback.op == cex.op);

    MultiplicationOperator mult;
    mult.sites = {"a", "b", "c"};
    mult.modulus = {0.5, 1.0, 2.0};
    mult.marked_site = 1;
    mult.marked_phase = -1.0;
    const AdversarialChain adv = adversarial_mult_chain(mult, 0.5, 4);
    check_redump_stable(adv);
    const AdversarialChain aback = roundtrip(adv);
    CHECK(aback.escape_index == adv.escape_index);
    CHECK(aback.functions == adv.functions);
    CHECK(aback.defect_sups == adv.defect_sups);
}

TEST_CASE("conjugacy artifacts roundtrip") {
    const SiteResponse resp{{-1.0, 0.0, 1.0}, {-0.3, 0.0, 0.3}};
    CHECK(roundtrip(resp) == resp);
    check_strict_shape(resp);

    const Perturbation cst = ConstantPerturbation{sample_vec()};
    const Perturbation cback = roundtrip(cst);
    REQUIRE(std::holds_alternative<ConstantPerturbation>(cback));
    CHECK(std::get<ConstantPerturbation>(cback) == std::get<ConstantPerturbation>(cst));
    CHECK(json(cst).at("kind") == "constant");

    TablePerturbation table;
    table.response[0] = resp;
    table.response[-3] = SiteResponse{{0.0}, {0.7}};
    const Perturbation tab{table};
    const Perturbation tback = roundtrip(tab);
    REQUIRE(std::holds_alternative<TablePerturbation>(tback));
    CHECK(std::get<TablePerturbation>(tback) == table);
    check_redump_stable(tab);

    // Parsing runs the same validation as direct construction.
    CHECK_THROWS_AS(
        (void)json::parse(
            R"({"kind":"table","response":[[0,{"inputs":[1.0,0.0],"outputs":[0.1,0.2]}]]})")
            .get<Perturbation>(),
        ConfigError);
    CHECK_THROWS_AS((void)json::parse(R"({"kind":"random"})").get<Perturbation>(),
                    ConfigError);

    const PerturbedMap pm{LinearOp{ScalarOperator{2.0}}, cst};
    check_redump_stable(pm);
    const PerturbedMap pmback = roundtrip(pm);
    REQUIRE(std::holds_alternative<ScalarOperator>(pmback.base));
    CHECK(std::get<ScalarOperator>(pmback.base).lambda == 2.0);

    SeriesResult series;
    series.value = sample_vec();
    series.cutoff = 28;
    series.truncation_bound = 6.3e-11;
    check_redump_stable(series);
    CHECK(roundtrip(series).cutoff == 28);
    CHECK(roundtrip(series).truncation_bound == 6.3e-11);
    check_strict_shape(series);

    ConjugacyPoint point;
    point.phi_x = sample_vec();
    point.displacement = 0.01;
    point.cutoff = 28;
    point.truncation_bound = 1e-11;
    point.residual_bound = 2e-11;
    check_redump_stable(point);
    CHECK(roundtrip(point).residual_bound == 2e-11);

    SemiconjugacyReport semi;
    semi.residuals = {1e-12, 3e-11};
    semi.max_residual = 3e-11;
    check_redump_stable(semi);
    CHECK(roundtrip(semi).residuals == semi.residuals);

    // A reconstructed homeomorphism acts identically, coefficient for
    // coefficient.
    const SeqVec origin(IndexWindow(-8, 8));
    SeqVec a(IndexWindow(-8, 8));
    a.set(0, 0.2);
    SeqVec b(IndexWindow(-8, 8));
    b.set(0, -0.4);
    const BallHomeo h =
        radial_homeo(origin, 1.0, SeminormFamily::lp(2.0), 1, a, b);
    check_redump_stable(h);
    const BallHomeo hback = roundtrip(h);
    REQUIRE(hback.stages.size() == h.stages.size());
    SeqVec probe(IndexWindow(-8, 8));
    probe.set(0, 0.15);
    probe.set(1, -0.05);
    CHECK(radial_homeo_apply(hback, probe) == radial_homeo_apply(h, probe));
    check_strict_shape(h);
    check_strict_shape(h.stages[0]);
}
