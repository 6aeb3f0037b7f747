#include "shadowlab/serialize.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

/// Strict shape check: exactly the listed keys, no more, no fewer.
void expect_keys(const json& j, std::initializer_list<const char*> keys, const char* what) {
    if (!j.is_object()) bad(std::string(what) + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* want : keys)
            if (item.key() == want) {
                known = true;
                break;
            }
        if (!known) bad(std::string(what) + ": unknown key '" + item.key() + "'");
    }
    for (const char* want : keys)
        if (!j.contains(want)) bad(std::string(what) + ": missing key '" + want + "'");
}

json enc_real(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0.0 ? "inf" : "-inf";
}

double dec_real(const json& j, const char* what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    bad(std::string(what) + ": expected a number or one of \"inf\", \"-inf\", \"nan\"");
}

double dec_finite(const json& j, const char* what) {
    if (!j.is_number()) bad(std::string(what) + ": expected a finite number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(std::string(what) + ": expected a finite number");
    return v;
}

json enc_reals(const std::vector<double>& v) {
    json a = json::array();
    for (const double x : v) a.push_back(enc_real(x));
    return a;
}

std::vector<double> dec_reals(const json& j, const char* what) {
    if (!j.is_array()) bad(std::string(what) + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(dec_real(e, what));
    return out;
}

std::int64_t dec_int(const json& j, const char* what) {
    if (!j.is_number_integer()) bad(std::string(what) + ": expected an integer");
    return j.get<std::int64_t>();
}

std::size_t dec_uint(const json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        bad(std::string(what) + ": expected a non-negative integer");
    return j.get<std::size_t>();
}

bool dec_bool(const json& j, const char* what) {
    if (!j.is_boolean()) bad(std::string(what) + ": expected a boolean");
    return j.get<bool>();
}

std::string dec_str(const json& j, const char* what) {
    if (!j.is_string()) bad(std::string(what) + ": expected a string");
    return j.get<std::string>();
}

const char* orientation_str(SplitOrientation o) {
    switch (o) {
        case SplitOrientation::UpperContractsForward: return "upper_contracts_forward";
        case SplitOrientation::LowerContractsForward: return "lower_contracts_forward";
        case SplitOrientation::AllContractsForward: return "all_contracts_forward";
        case SplitOrientation::AllExpandsForward: return "all_expands_forward";
    }
    bad("orientation: unrepresentable value");
}

SplitOrientation orientation_from(const std::string& s) {
    if (s == "upper_contracts_forward") return SplitOrientation::UpperContractsForward;
    if (s == "lower_contracts_forward") return SplitOrientation::LowerContractsForward;
    if (s == "all_contracts_forward") return SplitOrientation::AllContractsForward;
    if (s == "all_expands_forward") return SplitOrientation::AllExpandsForward;
    bad("orientation: unknown value '" + s + "'");
}

const char* expansivity_str(ExpansivityKind k) {
    switch (k) {
        case ExpansivityKind::NotExpansive: return "not_expansive";
        case ExpansivityKind::PositivelyExpansiveForward: return "positively_expansive_forward";
        case ExpansivityKind::PositivelyExpansiveInverse: return "positively_expansive_inverse";
        case ExpansivityKind::Both: return "both";
        case ExpansivityKind::TopologicallyExpansive: return "topologically_expansive";
    }
    bad("expansivity kind: unrepresentable value");
}

ExpansivityKind expansivity_from(const std::string& s) {
    if (s == "not_expansive") return ExpansivityKind::NotExpansive;
    if (s == "positively_expansive_forward") return ExpansivityKind::PositivelyExpansiveForward;
    if (s == "positively_expansive_inverse") return ExpansivityKind::PositivelyExpansiveInverse;
    if (s == "both") return ExpansivityKind::Both;
    if (s == "topologically_expansive") return ExpansivityKind::TopologicallyExpansive;
    bad("expansivity kind: unknown value '" + s + "'");
}

const char* confidence_str(ExpansivityVerdict::Confidence c) {
    switch (c) {
        case ExpansivityVerdict::Confidence::Analytic: return "analytic";
        case ExpansivityVerdict::Confidence::HorizonOnly: return "horizon_only";
        case ExpansivityVerdict::Confidence::Inconclusive: return "inconclusive";
    }
    bad("confidence: unrepresentable value");
}

ExpansivityVerdict::Confidence confidence_from(const std::string& s) {
    if (s == "analytic") return ExpansivityVerdict::Confidence::Analytic;
    if (s == "horizon_only") return ExpansivityVerdict::Confidence::HorizonOnly;
    if (s == "inconclusive") return ExpansivityVerdict::Confidence::Inconclusive;
    bad("confidence: unknown value '" + s + "'");
}

const char* condition_status_str(GradeConditionStatus s) {
    switch (s) {
        case GradeConditionStatus::Witnessed: return "witnessed";
        case GradeConditionStatus::NoWitnessUpToMaxGrade: return "no_witness_up_to_max_grade";
        case GradeConditionStatus::Inconclusive: return "inconclusive";
    }
    bad("condition status: unrepresentable value");
}

GradeConditionStatus condition_status_from(const std::string& s) {
    if (s == "witnessed") return GradeConditionStatus::Witnessed;
    if (s == "no_witness_up_to_max_grade") return GradeConditionStatus::NoWitnessUpToMaxGrade;
    if (s == "inconclusive") return GradeConditionStatus::Inconclusive;
    bad("condition status: unknown value '" + s + "'");
}

} // namespace

// --- windows and vectors ----------------------------------------------------

void to_json(json& j, const IndexWindow& w) { j = json{{"lo", w.lo}, {"hi", w.hi}}; }

void from_json(const json& j, IndexWindow& w) {
    expect_keys(j, {"lo", "hi"}, "index window");
    w = IndexWindow(dec_int(j.at("lo"), "window lo"), dec_int(j.at("hi"), "window hi"));
}

void to_json(json& j, const SeqVec& x) {
    j = json{{"window", x.window()}, {"coeffs", x.coeffs()}};
}

void from_json(const json& j, SeqVec& x) {
    expect_keys(j, {"window", "coeffs"}, "sequence vector");
    x = SeqVec(j.at("window").get<IndexWindow>(),
               j.at("coeffs").get<std::map<std::int64_t, double>>());
}

// --- weights -----------------------------------------------------------------

void to_json(json& j, const TailRule& t) {
    if (t.kind == TailRule::Kind::Constant) {
        j = json{{"kind", "constant"}, {"value", t.value}};
    } else {
        j = json{{"kind", "power_law"}, {"exponent", t.exponent},
                 {"positive_sign", t.positive_sign}};
    }
}

void from_json(const json& j, TailRule& t) {
    if (!j.is_object() || !j.contains("kind")) bad("tail rule: expected an object with 'kind'");
    const std::string kind = dec_str(j.at("kind"), "tail rule kind");
    if (kind == "constant") {
        expect_keys(j, {"kind", "value"}, "constant tail rule");
        const double v = dec_finite(j.at("value"), "tail rule value");
        if (v == 0.0) bad("tail rule value must be nonzero");
        t = TailRule::constant(v);
    } else if (kind == "power_law") {
        expect_keys(j, {"kind", "exponent", "positive_sign"}, "power-law tail rule");
        const double r = dec_finite(j.at("exponent"), "tail rule exponent");
        if (!(r > 0.0)) bad("tail rule exponent must be positive");
        t = TailRule::power_law(r, dec_bool(j.at("positive_sign"), "tail rule sign"));
    } else {
        bad("tail rule: unknown kind '" + kind + "'");
    }
}

void to_json(json& j, const WeightSequence& w) {
    j = json{{"table", w.table()}, {"left_tail", w.left_tail()}, {"right_tail", w.right_tail()}};
}

void from_json(const json& j, WeightSequence& w) {
    expect_keys(j, {"table", "left_tail", "right_tail"}, "weight sequence");
    w = WeightSequence(j.at("table").get<std::map<std::int64_t, double>>(),
                       j.at("left_tail").get<TailRule>(), j.at("right_tail").get<TailRule>());
}

// --- graded seminorms ---------------------------------------------------------

void to_json(json& j, const KotheMatrix& m) {
    switch (m.kind) {
        case KotheMatrix::Kind::Constant:
            j = json{{"kind", "constant"}, {"value", m.constant_value}};
            return;
        case KotheMatrix::Kind::PolynomialGrade:
            j = json{{"kind", "polynomial_grade"}};
            return;
        case KotheMatrix::Kind::BandIndicator:
            j = json{{"kind", "band_indicator"}, {"bands", m.bands}};
            return;
        case KotheMatrix::Kind::Table:
            j = json{{"kind", "table"}, {"window", m.table_window}, {"values", m.table_values}};
            return;
        case KotheMatrix::Kind::WeightedConstant:
            j = json{{"kind", "weighted_constant"}, {"weights", m.weights}};
            return;
    }
    bad("grade matrix: unrepresentable kind");
}

void from_json(const json& j, KotheMatrix& m) {
    if (!j.is_object() || !j.contains("kind")) bad("grade matrix: expected an object with 'kind'");
    const std::string kind = dec_str(j.at("kind"), "grade matrix kind");
    if (kind == "constant") {
        expect_keys(j, {"kind", "value"}, "constant grade matrix");
        m = KotheMatrix::constant(dec_finite(j.at("value"), "grade matrix value"));
    } else if (kind == "polynomial_grade") {
        expect_keys(j, {"kind"}, "polynomial grade matrix");
        m = KotheMatrix::polynomial_grade();
    } else if (kind == "band_indicator") {
        expect_keys(j, {"kind", "bands"}, "band grade matrix");
        m = KotheMatrix::band_indicator(j.at("bands").get<std::map<int, std::int64_t>>());
    } else if (kind == "table") {
        expect_keys(j, {"kind", "window", "values"}, "table grade matrix");
        m = KotheMatrix::table(
            j.at("window").get<IndexWindow>(),
            j.at("values").get<std::map<int, std::map<std::int64_t, double>>>());
    } else if (kind == "weighted_constant") {
        expect_keys(j, {"kind", "weights"}, "weighted grade matrix");
        m = KotheMatrix::weighted_constant(j.at("weights").get<WeightSequence>());
    } else {
        bad("grade matrix: unknown kind '" + kind + "'");
    }
}

void to_json(json& j, const SeminormFamily& f) {
    switch (f.kind) {
        case SeminormFamily::Kind::Lp:
            j = json{{"kind", "lp"}, {"p", f.p}};
            return;
        case SeminormFamily::Kind::C0:
            j = json{{"kind", "c0"}};
            return;
        case SeminormFamily::Kind::RapidDecrease:
            j = json{{"kind", "rapid_decrease"}};
            return;
        case SeminormFamily::Kind::KothePrimary:
            j = json{{"kind", "kothe"}, {"p", f.p}, {"matrix", f.matrix}};
            return;
        case SeminormFamily::Kind::OmegaProduct:
            j = json{{"kind", "omega_product"}};
            return;
    }
    bad("seminorm family: unrepresentable kind");
}

void from_json(const json& j, SeminormFamily& f) {
    if (!j.is_object() || !j.contains("kind"))
        bad("seminorm family: expected an object with 'kind'");
    const std::string kind = dec_str(j.at("kind"), "seminorm family kind");
    if (kind == "lp") {
        expect_keys(j, {"kind", "p"}, "lp family");
        f = SeminormFamily::lp(dec_finite(j.at("p"), "lp exponent"));
    } else if (kind == "c0") {
        expect_keys(j, {"kind"}, "c0 family");
        f = SeminormFamily::c0();
    } else if (kind == "rapid_decrease") {
        expect_keys(j, {"kind"}, "rapid-decrease family");
        f = SeminormFamily::rapid_decrease();
    } else if (kind == "kothe") {
        expect_keys(j, {"kind", "p", "matrix"}, "graded family");
        const double p = dec_finite(j.at("p"), "family exponent");
        f = SeminormFamily::kothe(j.at("matrix").get<KotheMatrix>(), p);
    } else if (kind == "omega_product") {
        expect_keys(j, {"kind"}, "product family");
        f = SeminormFamily::omega_product();
    } else {
        bad("seminorm family: unknown kind '" + kind + "'");
    }
}

// --- operators -----------------------------------------------------------------

void to_json(json& j, const ShiftOperator& op) {
    j = json{{"direction", op.direction == ShiftDirection::Forward ? "forward" : "backward"},
             {"weights", op.weights},
             {"inverted", op.inverted}};
}

void from_json(const json& j, ShiftOperator& op) {
    expect_keys(j, {"direction", "weights", "inverted"}, "shift operator");
    const std::string dir = dec_str(j.at("direction"), "shift direction");
    if (dir == "forward") {
        op.direction = ShiftDirection::Forward;
    } else if (dir == "backward") {
        op.direction = ShiftDirection::Backward;
    } else {
        bad("shift direction: unknown value '" + dir + "'");
    }
    op.weights = j.at("weights").get<WeightSequence>();
    op.inverted = dec_bool(j.at("inverted"), "shift inverted flag");
}

void to_json(json& j, const ScalarOperator& op) { j = json{{"lambda", op.lambda}}; }

void from_json(const json& j, ScalarOperator& op) {
    expect_keys(j, {"lambda"}, "scalar operator");
    op.lambda = dec_finite(j.at("lambda"), "scalar factor");
    if (op.lambda == 0.0) bad("scalar factor must be nonzero");
}

void to_json(json& j, const LinearOp& op) {
    if (const auto* s = std::get_if<ShiftOperator>(&op)) {
        j = *s;
        j["kind"] = "shift";
    } else {
        j = std::get<ScalarOperator>(op);
        j["kind"] = "scalar";
    }
}

void from_json(const json& j, LinearOp& op) {
    if (!j.is_object() || !j.contains("kind")) bad("operator: expected an object with 'kind'");
    const std::string kind = dec_str(j.at("kind"), "operator kind");
    json rest = j;
    rest.erase("kind");
    if (kind == "shift") {
        op = rest.get<ShiftOperator>();
    } else if (kind == "scalar") {
        op = rest.get<ScalarOperator>();
    } else {
        bad("operator: unknown kind '" + kind + "'");
    }
}

void to_json(json& j, const MultiplicationOperator& op) {
    j = json{{"sites", op.sites},
             {"modulus", op.modulus},
             {"marked_site", op.marked_site ? json(*op.marked_site) : json(nullptr)},
             {"marked_phase", op.marked_phase},
             {"compacts", op.compacts}};
}

void from_json(const json& j, MultiplicationOperator& op) {
    expect_keys(j, {"sites", "modulus", "marked_site", "marked_phase", "compacts"},
                "multiplication operator");
    op.sites = j.at("sites").get<std::vector<std::string>>();
    op.modulus.clear();
    for (const auto& e : j.at("modulus")) op.modulus.push_back(dec_finite(e, "modulus"));
    if (j.at("marked_site").is_null()) {
        op.marked_site.reset();
    } else {
        op.marked_site = dec_uint(j.at("marked_site"), "marked site");
    }
    op.marked_phase = dec_finite(j.at("marked_phase"), "marked phase");
    op.compacts =
        j.at("compacts").get<std::vector<std::pair<std::string, std::vector<std::size_t>>>>();
    validate_multiplication(op);
}

void to_json(json& j, const GradeConditionVerdict& v) {
    j = json{{"grade", v.grade},
             {"status", condition_status_str(v.status)},
             {"witness_m", v.witness_m},
             {"sup_estimate", enc_real(v.sup_estimate)},
             {"analytic", v.analytic},
             {"note", v.note}};
}

void from_json(const json& j, GradeConditionVerdict& v) {
    expect_keys(j, {"grade", "status", "witness_m", "sup_estimate", "analytic", "note"},
                "grade condition verdict");
    v.grade = static_cast<int>(dec_int(j.at("grade"), "grade"));
    v.status = condition_status_from(dec_str(j.at("status"), "status"));
    v.witness_m = static_cast<int>(dec_int(j.at("witness_m"), "witness grade"));
    v.sup_estimate = dec_real(j.at("sup_estimate"), "sup estimate");
    v.analytic = dec_bool(j.at("analytic"), "analytic flag");
    v.note = dec_str(j.at("note"), "note");
}

void to_json(json& j, const GradeConditionReport& r) {
    j = json{{"per_grade", r.per_grade}, {"all_witnessed", r.all_witnessed}};
}

void from_json(const json& j, GradeConditionReport& r) {
    expect_keys(j, {"per_grade", "all_witnessed"}, "grade condition report");
    r.per_grade = j.at("per_grade").get<std::vector<GradeConditionVerdict>>();
    r.all_witnessed = dec_bool(j.at("all_witnessed"), "all witnessed flag");
}

void to_json(json& j, const CompactVerdict& v) {
    j = json{{"name", v.name},
             {"hyperbolic", v.hyperbolic},
             {"t", enc_real(v.t)},
             {"failing_sites", v.failing_sites}};
}

void from_json(const json& j, CompactVerdict& v) {
    expect_keys(j, {"name", "hyperbolic", "t", "failing_sites"}, "compact verdict");
    v.name = dec_str(j.at("name"), "compact name");
    v.hyperbolic = dec_bool(j.at("hyperbolic"), "hyperbolic flag");
    v.t = dec_real(j.at("t"), "contraction rate");
    v.failing_sites = j.at("failing_sites").get<std::vector<std::size_t>>();
}

// --- splitting certificates ------------------------------------------------------

void to_json(json& j, const GradeConstants& g) {
    j = json{{"beta", g.beta}, {"c", enc_real(g.c)}, {"t", enc_real(g.t)}};
}

void from_json(const json& j, GradeConstants& g) {
    expect_keys(j, {"beta", "c", "t"}, "grade constants");
    g.beta = static_cast<int>(dec_int(j.at("beta"), "beta"));
    g.c = dec_real(j.at("c"), "constant c");
    g.t = dec_real(j.at("t"), "rate t");
}

void to_json(json& j, const GHCertificate& c) {
    j = json{{"split_boundary", c.split_boundary},
             {"orientation", orientation_str(c.orientation)},
             {"grade_constants", c.grade_constants},
             {"d", enc_real(c.d)},
             {"trivial_splitting", c.trivial_splitting},
             {"note", c.note}};
}

void from_json(const json& j, GHCertificate& c) {
    expect_keys(j,
                {"split_boundary", "orientation", "grade_constants", "d", "trivial_splitting",
                 "note"},
                "splitting certificate");
    c.split_boundary = dec_int(j.at("split_boundary"), "split boundary");
    c.orientation = orientation_from(dec_str(j.at("orientation"), "orientation"));
    c.grade_constants = j.at("grade_constants").get<std::map<int, GradeConstants>>();
    c.d = dec_real(j.at("d"), "projection bound");
    c.trivial_splitting = dec_bool(j.at("trivial_splitting"), "trivial splitting flag");
    c.note = dec_str(j.at("note"), "note");
}

void to_json(json& j, const SplitDetection& d) {
    j = json{{"certificate", d.certificate ? json(*d.certificate) : json(nullptr)},
             {"reason", d.reason}};
}

void from_json(const json& j, SplitDetection& d) {
    expect_keys(j, {"certificate", "reason"}, "split detection");
    if (j.at("certificate").is_null()) {
        d.certificate.reset();
    } else {
        d.certificate = j.at("certificate").get<GHCertificate>();
    }
    d.reason = dec_str(j.at("reason"), "reason");
}

void to_json(json& j, const DeltaForEps& d) {
    j = json{{"input_grade", d.input_grade},
             {"delta", enc_real(d.delta)},
             {"c", enc_real(d.c)},
             {"t", enc_real(d.t)},
             {"d", enc_real(d.d)}};
}

void from_json(const json& j, DeltaForEps& d) {
    expect_keys(j, {"input_grade", "delta", "c", "t", "d"}, "defect budget");
    d.input_grade = static_cast<int>(dec_int(j.at("input_grade"), "input grade"));
    d.delta = dec_real(j.at("delta"), "delta");
    d.c = dec_real(j.at("c"), "constant c");
    d.t = dec_real(j.at("t"), "rate t");
    d.d = dec_real(j.at("d"), "projection bound");
}

// --- expansivity -------------------------------------------------------------------

void to_json(json& j, const GrowthSlots& s) {
    j = json{{"n_log_n", enc_real(s.n_log_n)},
             {"linear", enc_real(s.linear)},
             {"log_n", enc_real(s.log_n)}};
}

void from_json(const json& j, GrowthSlots& s) {
    expect_keys(j, {"n_log_n", "linear", "log_n"}, "growth slots");
    s.n_log_n = dec_real(j.at("n_log_n"), "n log n slot");
    s.linear = dec_real(j.at("linear"), "linear slot");
    s.log_n = dec_real(j.at("log_n"), "log n slot");
}

void to_json(json& j, const BranchEvidence& b) {
    j = json{{"diverges", b.diverges},
             {"analytic", b.analytic},
             {"slots", b.slots},
             {"scan_log_sup", enc_real(b.scan_log_sup)},
             {"scan_argmax", b.scan_argmax},
             {"summary", b.summary}};
}

void from_json(const json& j, BranchEvidence& b) {
    expect_keys(j, {"diverges", "analytic", "slots", "scan_log_sup", "scan_argmax", "summary"},
                "branch evidence");
    b.diverges = dec_bool(j.at("diverges"), "diverges flag");
    b.analytic = dec_bool(j.at("analytic"), "analytic flag");
    b.slots = j.at("slots").get<GrowthSlots>();
    b.scan_log_sup = dec_real(j.at("scan_log_sup"), "scan log sup");
    b.scan_argmax = dec_int(j.at("scan_argmax"), "scan argmax");
    b.summary = dec_str(j.at("summary"), "summary");
}

void to_json(json& j, const GradeBranches& g) {
    j = json{{"grade", g.grade}, {"forward", g.forward}, {"inverse", g.inverse}};
}

void from_json(const json& j, GradeBranches& g) {
    expect_keys(j, {"grade", "forward", "inverse"}, "grade branches");
    g.grade = static_cast<int>(dec_int(j.at("grade"), "grade"));
    g.forward = j.at("forward").get<BranchEvidence>();
    g.inverse = j.at("inverse").get<BranchEvidence>();
}

void to_json(json& j, const ExpansivityVerdict& v) {
    j = json{{"kind", expansivity_str(v.kind)},
             {"confidence", confidence_str(v.confidence)},
             {"witness_grade", v.witness_grade},
             {"evidence", v.evidence},
             {"note", v.note}};
}

void from_json(const json& j, ExpansivityVerdict& v) {
    expect_keys(j, {"kind", "confidence", "witness_grade", "evidence", "note"},
                "expansivity verdict");
    v.kind = expansivity_from(dec_str(j.at("kind"), "kind"));
    v.confidence = confidence_from(dec_str(j.at("confidence"), "confidence"));
    v.witness_grade = static_cast<int>(dec_int(j.at("witness_grade"), "witness grade"));
    v.evidence = j.at("evidence").get<std::vector<GradeBranches>>();
    v.note = dec_str(j.at("note"), "note");
}

void to_json(json& j, const WitnessSample& s) {
    j = json{{"index", s.index},
             {"forward", s.forward},
             {"projection", enc_real(s.projection)},
             {"observed", enc_real(s.observed)},
             {"bound", enc_real(s.bound)},
             {"pass", s.pass}};
}

void from_json(const json& j, WitnessSample& s) {
    expect_keys(j, {"index", "forward", "projection", "observed", "bound", "pass"},
                "witness sample");
    s.index = dec_uint(j.at("index"), "sample index");
    s.forward = dec_bool(j.at("forward"), "forward flag");
    s.projection = dec_real(j.at("projection"), "projection");
    s.observed = dec_real(j.at("observed"), "observed growth");
    s.bound = dec_real(j.at("bound"), "bound");
    s.pass = dec_bool(j.at("pass"), "pass flag");
}

void to_json(json& j, const WitnessReport& r) {
    j = json{{"route", r.route},         {"boundary", r.boundary},
             {"rate", enc_real(r.rate)}, {"bound", enc_real(r.bound)},
             {"all_pass", r.all_pass},   {"samples", r.samples},
             {"note", r.note}};
}

void from_json(const json& j, WitnessReport& r) {
    expect_keys(j, {"route", "boundary", "rate", "bound", "all_pass", "samples", "note"},
                "witness report");
    r.route = dec_str(j.at("route"), "route");
    r.boundary = dec_int(j.at("boundary"), "boundary");
    r.rate = dec_real(j.at("rate"), "rate");
    r.bound = dec_real(j.at("bound"), "bound");
    r.all_pass = dec_bool(j.at("all_pass"), "all pass flag");
    r.samples = j.at("samples").get<std::vector<WitnessSample>>();
    r.note = dec_str(j.at("note"), "note");
}

void to_json(json& j, const DoublingResult& d) {
    j = json{{"found", d.found}, {"n", d.n}, {"ratio", enc_real(d.ratio)}};
}

void from_json(const json& j, DoublingResult& d) {
    expect_keys(j, {"found", "n", "ratio"}, "doubling result");
    d.found = dec_bool(j.at("found"), "found flag");
    d.n = dec_int(j.at("n"), "doubling time");
    d.ratio = dec_real(j.at("ratio"), "ratio");
}

void to_json(json& j, const OrbitScanResult& r) {
    j = json{{"values", enc_reals(r.values)},
             {"steps_completed", r.steps_completed},
             {"stopped_at_bound", r.stopped_at_bound},
             {"truncated_overflow", r.truncated_overflow}};
}

void from_json(const json& j, OrbitScanResult& r) {
    expect_keys(j, {"values", "steps_completed", "stopped_at_bound", "truncated_overflow"},
                "orbit scan");
    r.values = dec_reals(j.at("values"), "orbit values");
    r.steps_completed = dec_int(j.at("steps_completed"), "steps completed");
    r.stopped_at_bound = dec_bool(j.at("stopped_at_bound"), "stopped flag");
    r.truncated_overflow = dec_bool(j.at("truncated_overflow"), "overflow flag");
}

// --- shadowing -----------------------------------------------------------------------

void to_json(json& j, const Pseudotrajectory& p) {
    j = json{{"points", p.points},     {"defects", p.defects}, {"grade", p.grade},
             {"delta", enc_real(p.delta)}, {"periodic", p.periodic}, {"origin", p.origin}};
}

void from_json(const json& j, Pseudotrajectory& p) {
    expect_keys(j, {"points", "defects", "grade", "delta", "periodic", "origin"},
                "pseudotrajectory");
    p.points = j.at("points").get<std::vector<SeqVec>>();
    p.defects = j.at("defects").get<std::vector<SeqVec>>();
    p.grade = static_cast<int>(dec_int(j.at("grade"), "grade"));
    p.delta = dec_real(j.at("delta"), "delta");
    p.periodic = dec_bool(j.at("periodic"), "periodic flag");
    p.origin = dec_int(j.at("origin"), "origin");
}

void to_json(json& j, const PseudoValidation& v) {
    j = json{{"ok", v.ok},
             {"max_defect", enc_real(v.max_defect)},
             {"worst_excess", enc_real(v.worst_excess)},
             {"message", v.message}};
}

void from_json(const json& j, PseudoValidation& v) {
    expect_keys(j, {"ok", "max_defect", "worst_excess", "message"}, "pseudotrajectory check");
    v.ok = dec_bool(j.at("ok"), "ok flag");
    v.max_defect = dec_real(j.at("max_defect"), "max defect");
    v.worst_excess = dec_real(j.at("worst_excess"), "worst excess");
    v.message = dec_str(j.at("message"), "message");
}

void to_json(json& j, const ShadowReport& r) {
    j = json{{"shadow_point", r.shadow_point},
             {"deviations", enc_reals(r.deviations)},
             {"max_deviation", enc_real(r.max_deviation)},
             {"bound_used", enc_real(r.bound_used)},
             {"periodic_residual", enc_real(r.periodic_residual)},
             {"residual_bound", enc_real(r.residual_bound)},
             {"truncation_tolerance", enc_real(r.truncation_tolerance)},
             {"series_terms", r.series_terms}};
}

void from_json(const json& j, ShadowReport& r) {
    expect_keys(j,
                {"shadow_point", "deviations", "max_deviation", "bound_used", "periodic_residual",
                 "residual_bound", "truncation_tolerance", "series_terms"},
                "shadow report");
    r.shadow_point = j.at("shadow_point").get<SeqVec>();
    r.deviations = dec_reals(j.at("deviations"), "deviations");
    r.max_deviation = dec_real(j.at("max_deviation"), "max deviation");
    r.bound_used = dec_real(j.at("bound_used"), "bound used");
    r.periodic_residual = dec_real(j.at("periodic_residual"), "periodic residual");
    r.residual_bound = dec_real(j.at("residual_bound"), "residual bound");
    r.truncation_tolerance = dec_real(j.at("truncation_tolerance"), "truncation tolerance");
    r.series_terms = dec_int(j.at("series_terms"), "series terms");
}

void to_json(json& j, const VerifyResult& r) {
    j = json{{"deviations", enc_reals(r.deviations)},
             {"max_deviation", enc_real(r.max_deviation)},
             {"max_defect_mismatch", enc_real(r.max_defect_mismatch)},
             {"defects_consistent", r.defects_consistent}};
}

void from_json(const json& j, VerifyResult& r) {
    expect_keys(j, {"deviations", "max_deviation", "max_defect_mismatch", "defects_consistent"},
                "verify result");
    r.deviations = dec_reals(j.at("deviations"), "deviations");
    r.max_deviation = dec_real(j.at("max_deviation"), "max deviation");
    r.max_defect_mismatch = dec_real(j.at("max_defect_mismatch"), "max defect mismatch");
    r.defects_consistent = dec_bool(j.at("defects_consistent"), "defects consistent flag");
}

void to_json(json& j, const CounterexampleReport& r) {
    j = json{{"cycle", r.cycle},
             {"op", r.op},
             {"fam", r.fam},
             {"n", r.n},
             {"peak", enc_real(r.peak)},
             {"separation", enc_real(r.separation)},
             {"argument", r.argument}};
}

void from_json(const json& j, CounterexampleReport& r) {
    expect_keys(j, {"cycle", "op", "fam", "n", "peak", "separation", "argument"},
                "counterexample report");
    r.cycle = j.at("cycle").get<Pseudotrajectory>();
    r.op = j.at("op").get<ShiftOperator>();
    r.fam = j.at("fam").get<SeminormFamily>();
    r.n = dec_int(j.at("n"), "ramp height index");
    r.peak = dec_real(j.at("peak"), "peak");
    r.separation = dec_real(j.at("separation"), "separation");
    r.argument = dec_str(j.at("argument"), "argument");
}

void to_json(json& j, const AdversarialChain& c) {
    json funcs = json::array();
    for (const auto& f : c.functions) funcs.push_back(enc_reals(f));
    j = json{{"functions", funcs},
             {"defect_sups", enc_reals(c.defect_sups)},
             {"delta", enc_real(c.delta)},
             {"escape_index", c.escape_index},
             {"note", c.note}};
}

void from_json(const json& j, AdversarialChain& c) {
    expect_keys(j, {"functions", "defect_sups", "delta", "escape_index", "note"},
                "adversarial chain");
    c.functions.clear();
    if (!j.at("functions").is_array()) bad("adversarial chain: 'functions' must be an array");
    for (const auto& f : j.at("functions")) c.functions.push_back(dec_reals(f, "function values"));
    c.defect_sups = dec_reals(j.at("defect_sups"), "defect sups");
    c.delta = dec_real(j.at("delta"), "delta");
    c.escape_index = dec_int(j.at("escape_index"), "escape index");
    c.note = dec_str(j.at("note"), "note");
}

// --- conjugacy -----------------------------------------------------------------------

void to_json(json& j, const SiteResponse& r) {
    j = json{{"inputs", r.inputs}, {"outputs", r.outputs}};
}

void from_json(const json& j, SiteResponse& r) {
    expect_keys(j, {"inputs", "outputs"}, "site response");
    r.inputs.clear();
    r.outputs.clear();
    for (const auto& e : j.at("inputs")) r.inputs.push_back(dec_finite(e, "response input"));
    for (const auto& e : j.at("outputs")) r.outputs.push_back(dec_finite(e, "response output"));
}

void to_json(json& j, const Perturbation& g) {
    if (const auto* c = std::get_if<ConstantPerturbation>(&g)) {
        j = json{{"kind", "constant"}, {"value", c->value}};
    } else {
        j = json{{"kind", "table"}, {"response", std::get<TablePerturbation>(g).response}};
    }
}

void from_json(const json& j, Perturbation& g) {
    if (!j.is_object() || !j.contains("kind")) bad("perturbation: expected an object with 'kind'");
    const std::string kind = dec_str(j.at("kind"), "perturbation kind");
    if (kind == "constant") {
        expect_keys(j, {"kind", "value"}, "constant perturbation");
        g = ConstantPerturbation{j.at("value").get<SeqVec>()};
    } else if (kind == "table") {
        expect_keys(j, {"kind", "response"}, "table perturbation");
        g = TablePerturbation{j.at("response").get<std::map<std::int64_t, SiteResponse>>()};
    } else {
        bad("perturbation: unknown kind '" + kind + "'");
    }
    validate_perturbation(g);
}

void to_json(json& j, const PerturbedMap& m) { j = json{{"base", m.base}, {"g", m.g}}; }

void from_json(const json& j, PerturbedMap& m) {
    expect_keys(j, {"base", "g"}, "perturbed map");
    m.base = j.at("base").get<LinearOp>();
    m.g = j.at("g").get<Perturbation>();
}

void to_json(json& j, const SeriesResult& r) {
    j = json{{"value", r.value},
             {"cutoff", r.cutoff},
             {"truncation_bound", enc_real(r.truncation_bound)}};
}

void from_json(const json& j, SeriesResult& r) {
    expect_keys(j, {"value", "cutoff", "truncation_bound"}, "series result");
    r.value = j.at("value").get<SeqVec>();
    r.cutoff = dec_int(j.at("cutoff"), "cutoff");
    r.truncation_bound = dec_real(j.at("truncation_bound"), "truncation bound");
}

void to_json(json& j, const ConjugacyPoint& p) {
    j = json{{"phi_x", p.phi_x},
             {"displacement", enc_real(p.displacement)},
             {"cutoff", p.cutoff},
             {"truncation_bound", enc_real(p.truncation_bound)},
             {"residual_bound", enc_real(p.residual_bound)}};
}

void from_json(const json& j, ConjugacyPoint& p) {
    expect_keys(j, {"phi_x", "displacement", "cutoff", "truncation_bound", "residual_bound"},
                "conjugacy point");
    p.phi_x = j.at("phi_x").get<SeqVec>();
    p.displacement = dec_real(j.at("displacement"), "displacement");
    p.cutoff = dec_int(j.at("cutoff"), "cutoff");
    p.truncation_bound = dec_real(j.at("truncation_bound"), "truncation bound");
    p.residual_bound = dec_real(j.at("residual_bound"), "residual bound");
}

void to_json(json& j, const SemiconjugacyReport& r) {
    j = json{{"residuals", enc_reals(r.residuals)}, {"max_residual", enc_real(r.max_residual)}};
}

void from_json(const json& j, SemiconjugacyReport& r) {
    expect_keys(j, {"residuals", "max_residual"}, "semiconjugacy report");
    r.residuals = dec_reals(j.at("residuals"), "residuals");
    r.max_residual = dec_real(j.at("max_residual"), "max residual");
}

void to_json(json& j, const RadialStage& s) {
    j = json{{"center", s.center}, {"radius", s.radius},   {"k", s.k},
             {"u_mid", s.u_mid},   {"phi_mid", s.phi_mid}, {"inverted", s.inverted}};
}

void from_json(const json& j, RadialStage& s) {
    expect_keys(j, {"center", "radius", "k", "u_mid", "phi_mid", "inverted"}, "radial stage");
    s.center = j.at("center").get<SeqVec>();
    s.radius = dec_finite(j.at("radius"), "stage radius");
    s.k = dec_int(j.at("k"), "profile break");
    s.u_mid = dec_finite(j.at("u_mid"), "profile middle input");
    s.phi_mid = dec_finite(j.at("phi_mid"), "profile middle output");
    s.inverted = dec_bool(j.at("inverted"), "inverted flag");
}

void to_json(json& j, const BallHomeo& h) {
    j = json{{"fam", h.fam},
             {"grade", h.grade},
             {"center", h.center},
             {"radius", h.radius},
             {"stages", h.stages}};
}

void from_json(const json& j, BallHomeo& h) {
    expect_keys(j, {"fam", "grade", "center", "radius", "stages"}, "ball homeomorphism");
    h.fam = j.at("fam").get<SeminormFamily>();
    h.grade = static_cast<int>(dec_int(j.at("grade"), "grade"));
    h.center = j.at("center").get<SeqVec>();
    h.radius = dec_finite(j.at("radius"), "ball radius");
    h.stages = j.at("stages").get<std::vector<RadialStage>>();
}

} // namespace shadowlab
