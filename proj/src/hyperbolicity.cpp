#include "shadowlab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoeffGuard = 1e280;

/// Offset between operator sites and weight indices: factor(j) reads the
/// stored weight at j + offset.
std::int64_t weight_offset(const ShiftOperator& op) { return op.weight_index(0); }

/// First site (in operator coordinates) governed by the tail rule on the
/// given side; sites strictly between the two starts read the core table.
std::int64_t factor_tail_start(const ShiftOperator& op, bool right_side) {
    return op.weights.tail_start(right_side) - weight_offset(op);
}

/// Core factor sites: the (possibly empty) block between the two tail starts.
std::vector<std::int64_t> core_factor_sites(const ShiftOperator& op) {
    const std::int64_t ls = factor_tail_start(op, false);
    const std::int64_t rs = factor_tail_start(op, true);
    std::vector<std::int64_t> sites;
    for (std::int64_t j = ls + 1; j <= rs - 1; ++j) sites.push_back(j);
    return sites;
}

struct TailRange {
    double sup = 0.0;
    double inf = kInf;
};

/// sup/inf of |factor(j)| over one factor tail, by a finite scan that covers
/// any dip of (|index|+1)^r through index zero plus the exact rule limit.
TailRange factor_tail_range(const ShiftOperator& op, bool right_side) {
    const TailClass cls = op.factor_class(right_side);
    if (!cls.is_poly()) return {kInf, 0.0}; // undecidable; forces "no pattern"
    const std::int64_t start = factor_tail_start(op, right_side);
    const std::int64_t dip = -weight_offset(op); // site whose weight index is 0
    std::int64_t a, b;
    if (right_side) {
        a = start;
        b = std::max(start, dip) + 64;
    } else {
        b = start;
        a = std::min(start, dip) - 64;
    }
    TailRange r;
    for (std::int64_t j = a; j <= b; ++j) {
        const double v = std::fabs(op.factor(j));
        r.sup = std::max(r.sup, v);
        r.inf = std::min(r.inf, v);
    }
    // Beyond the scan the rule value is monotone in the distance from the dip.
    if (cls.exponent > 0.0) r.sup = kInf;
    if (cls.exponent < 0.0) r.inf = 0.0;
    return r;
}

/// Per-grade polynomial exponent e and constant prefactor for the bound
///   a(j + n, grade) / a(j, grade) <= pref * (n+1)^e   for all j, n
/// (same bound in both shift directions), or a reason why the matrix kind
/// does not admit one.
struct MatrixGate {
    bool ok = false;
    std::string reason;
    double pref = 1.0;
    bool grade_exponent = false; // e = grade (else e = 0)
};

MatrixGate gate_matrix(const KotheMatrix& A) {
    MatrixGate g;
    switch (A.kind) {
        case KotheMatrix::Kind::Constant:
            g.ok = true;
            return g;
        case KotheMatrix::Kind::PolynomialGrade:
            g.ok = true;
            g.grade_exponent = true; // ((|j+n|+1)/(|j|+1))^k <= (n+1)^k
            return g;
        case KotheMatrix::Kind::BandIndicator:
            g.reason = "band rows vanish where shifted mass lands, so no ratio bound exists";
            return g;
        case KotheMatrix::Kind::Table:
            g.reason = "table rows carry no rule beyond their window, so no ratio bound exists";
            return g;
        case KotheMatrix::Kind::WeightedConstant: {
            const WeightSequence& v = A.weights;
            if (v.left_tail().kind != TailRule::Kind::Constant ||
                v.right_tail().kind != TailRule::Kind::Constant) {
                g.reason = "weighted rows with non-constant tails are not certified";
                return g;
            }
            double vmax = 0.0;
            double vmin = kInf;
            auto take = [&](double val) {
                const double m = std::fabs(val);
                vmax = std::max(vmax, m);
                vmin = std::min(vmin, m);
            };
            take(v.left_tail().value);
            take(v.right_tail().value);
            for (const auto& [j, val] : v.table()) take(val);
            if (!(vmin > 0.0) || !std::isfinite(vmax)) {
                g.reason = "weighted rows must be strictly positive and finite";
                return g;
            }
            g.ok = true;
            g.pref = vmax / vmin;
            return g;
        }
    }
    g.reason = "unrecognized grade-matrix kind";
    return g;
}

/// sup_{n >= 0} (n+1)^e t^n located by a finite scan; the scan stops once the
/// terms have decreased twice in a row and the one-step growth ratio
/// ((n+2)/(n+1))^e * t has fallen below 1, after which the terms are strictly
/// decreasing forever.
double damp(double e, double t) {
    if (e <= 0.0) return 1.0;
    if (!(t > 0.0 && t < 1.0)) throw PreconditionError("damp: rate must lie in (0, 1)");
    const bool int_e = e == std::floor(e) && e < 1e9;
    auto poly = [&](std::int64_t n) {
        return int_e ? ipow(static_cast<double>(n), static_cast<int>(e))
                     : std::pow(static_cast<double>(n), e);
    };
    double best = 1.0;
    double prev = 1.0;
    double tn = 1.0;
    int decreases = 0;
    for (std::int64_t n = 1; n <= 2'000'000; ++n) {
        tn *= t;
        const double term = poly(n + 1) * tn;
        best = std::max(best, term);
        decreases = term < prev ? decreases + 1 : 0;
        if (decreases >= 2 &&
            poly(n + 2) / poly(n + 1) * t < 1.0) {
            return best;
        }
        prev = term;
    }
    throw PreconditionError("damp: series maximum not located within the scan cap");
}

std::string describe_range(const char* name, const TailRange& r) {
    std::ostringstream os;
    os << name << " tail |factor| in [" << r.inf << ", " << r.sup << "]";
    return os.str();
}

/// Assemble the per-grade constants for a detected pattern.
///   rate:   one-step geometric bound for the contracting regime(s)
///   cprime: finite deficit collected from core sites (crossed at most once)
void fill_grade_constants(GHCertificate& cert, const std::vector<int>& grades,
                          const MatrixGate& gate, double rate, double cprime) {
    for (int k : grades) {
        if (k < 1) throw PreconditionError("grades are 1-based");
        GradeConstants gc;
        gc.beta = k;
        const double e = gate.grade_exponent ? static_cast<double>(k) : 0.0;
        if (e == 0.0) {
            gc.t = rate;
            gc.c = cprime * gate.pref;
        } else {
            gc.t = std::sqrt(rate);
            gc.c = cprime * gate.pref * damp(e, gc.t);
        }
        cert.grade_constants[k] = gc;
    }
}

} // namespace

bool GHCertificate::m_contains(std::int64_t j) const {
    switch (orientation) {
        case SplitOrientation::UpperContractsForward: return j >= split_boundary;
        case SplitOrientation::LowerContractsForward: return j <= split_boundary;
        case SplitOrientation::AllContractsForward: return true;
        case SplitOrientation::AllExpandsForward: return false;
    }
    return false;
}

SplitDetection detect_split(const ShiftOperator& op, const SeminormFamily& fam,
                            const std::vector<int>& grades) {
    if (grades.empty()) throw PreconditionError("detect_split: at least one grade is required");

    const MatrixGate gate = gate_matrix(fam.effective_matrix());
    if (!gate.ok) return {std::nullopt, gate.reason};

    const bool motion_right = op.motion() > 0;
    const TailRange mot = factor_tail_range(op, motion_right);
    const TailRange opp = factor_tail_range(op, !motion_right);
    if (!op.factor_class(true).is_poly() || !op.factor_class(false).is_poly()) {
        return {std::nullopt, "factor tail behavior is not decidable from the stored rules"};
    }

    const std::vector<std::int64_t> core = core_factor_sites(op);
    std::vector<double> core_abs;
    core_abs.reserve(core.size());
    for (std::int64_t j : core) {
        const double v = std::fabs(op.factor(j));
        if (!(v > 0.0) || !std::isfinite(v)) {
            return {std::nullopt, "a core factor vanishes or is not finite"};
        }
        core_abs.push_back(v);
    }

    std::ostringstream note;
    note << describe_range("left", motion_right ? opp : mot) << "; "
         << describe_range("right", motion_right ? mot : opp);

    GHCertificate cert;
    cert.d = 1.0;

    if (std::max(mot.sup, opp.sup) < 1.0) {
        // Every tail factor contracts; core sites are crossed at most once.
        const double rate = std::max(mot.sup, opp.sup);
        double cprime = 1.0;
        for (double v : core_abs) {
            if (v > rate) cprime *= v / rate;
        }
        cert.orientation = SplitOrientation::AllContractsForward;
        cert.trivial_splitting = true;
        note << "; every forward orbit contracts at rate " << rate;
        fill_grade_constants(cert, grades, gate, rate, cprime);
        cert.note = note.str();
        return {cert, ""};
    }

    if (std::min(mot.inf, opp.inf) > 1.0) {
        // Every tail factor expands; the inverse contracts everywhere.
        const double inf_all = std::min(mot.inf, opp.inf);
        const double rate = 1.0 / inf_all;
        double cprime = 1.0;
        for (double v : core_abs) {
            if (v < inf_all) cprime *= inf_all / v;
        }
        cert.orientation = SplitOrientation::AllExpandsForward;
        cert.trivial_splitting = true;
        note << "; every backward orbit contracts at rate " << rate;
        fill_grade_constants(cert, grades, gate, rate, cprime);
        cert.note = note.str();
        return {cert, ""};
    }

    if (mot.sup < 1.0 && opp.inf > 1.0) {
        // The side the support moves toward contracts forward; the rest of the
        // line expands forward, i.e. contracts under the restricted inverse.
        // Backward orbits from the complement cross each core site at most
        // once, giving a finite deficit against the opposite-tail floor.
        const double rate = std::max(mot.sup, 1.0 / opp.inf);
        double c_n = 1.0;
        for (double v : core_abs) {
            if (v < opp.inf) c_n *= opp.inf / v;
        }
        const double cprime = std::max(1.0, c_n);
        cert.split_boundary = factor_tail_start(op, motion_right);
        cert.orientation = motion_right ? SplitOrientation::UpperContractsForward
                                        : SplitOrientation::LowerContractsForward;
        cert.trivial_splitting = false;
        note << "; boundary " << cert.split_boundary << ", geometric rate " << rate
             << ", core deficit " << cprime;
        fill_grade_constants(cert, grades, gate, rate, cprime);
        cert.note = note.str();
        return {cert, ""};
    }

    if (mot.inf > 1.0 && opp.sup < 1.0) {
        return {std::nullopt,
                "uniformly expansive pattern: supports move toward the expanding tail, so no "
                "splitting is emitted (the uniform expansivity witness applies instead)"};
    }

    return {std::nullopt,
            "factor tails touch magnitude one or follow no supported pattern: " + note.str()};
}

SplitDetection certificate_for_scalar(const ScalarOperator& op, const std::vector<int>& grades) {
    if (grades.empty()) throw PreconditionError("certificate_for_scalar: at least one grade is required");
    const double a = std::fabs(op.lambda);
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw PreconditionError("certificate_for_scalar: the scalar must be nonzero and finite");
    }
    if (a == 1.0) {
        return {std::nullopt, "unit-modulus scalar: every orbit seminorm is constant"};
    }
    GHCertificate cert;
    cert.split_boundary = 0;
    cert.trivial_splitting = true;
    cert.d = 1.0;
    const double t = a < 1.0 ? a : 1.0 / a;
    cert.orientation = a < 1.0 ? SplitOrientation::AllContractsForward
                               : SplitOrientation::AllExpandsForward;
    for (int k : grades) {
        if (k < 1) throw PreconditionError("grades are 1-based");
        cert.grade_constants[k] = GradeConstants{k, 1.0, t};
    }
    std::ostringstream note;
    note << "scalar multiple with |lambda| = " << a
         << ": orbit seminorms scale exactly by |lambda|^n at every grade";
    cert.note = note.str();
    return {cert, ""};
}

SplitDetection detect_split(const LinearOp& op, const SeminormFamily& fam,
                            const std::vector<int>& grades) {
    if (const auto* sh = std::get_if<ShiftOperator>(&op)) return detect_split(*sh, fam, grades);
    return certificate_for_scalar(std::get<ScalarOperator>(op), grades);
}

SeqVec project_m(const GHCertificate& cert, const SeqVec& x) {
    SeqVec out(x.window());
    for (const auto& [j, v] : x.coeffs()) {
        if (cert.m_contains(j)) out.set(j, v);
    }
    return out;
}

SeqVec project_n(const GHCertificate& cert, const SeqVec& x) {
    SeqVec out(x.window());
    for (const auto& [j, v] : x.coeffs()) {
        if (!cert.m_contains(j)) out.set(j, v);
    }
    return out;
}

const GradeConstants& certificate_constants(const GHCertificate& cert, int grade) {
    const auto it = cert.grade_constants.find(grade);
    if (it == cert.grade_constants.end()) {
        throw PreconditionError("the certificate carries no constants at the working grade");
    }
    const GradeConstants& gc = it->second;
    if (!(gc.t > 0.0 && gc.t < 1.0)) {
        throw PreconditionError("the certificate rate must lie strictly inside (0, 1)");
    }
    return gc;
}

std::int64_t geometric_cutoff(double head, double t, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("the truncation tolerance must be positive");
    if (!(t > 0.0 && t < 1.0)) throw PreconditionError("the rate must lie strictly inside (0, 1)");
    if (!(head >= 0.0) || !std::isfinite(head)) {
        throw PreconditionError("the series head bound must be finite and nonnegative");
    }
    if (head <= tol) return 0;
    const auto h = static_cast<std::int64_t>(std::ceil(std::log(0.5) / std::log(t)));
    const auto blocks = static_cast<std::int64_t>(std::ceil(std::log2(head / tol)));
    return std::max<std::int64_t>(1, h) * std::max<std::int64_t>(0, blocks);
}

DeltaForEps delta_for_epsilon(const GHCertificate& cert, double eps, int alpha, ShadowMode mode) {
    (void)mode; // the same defect budget serves finite chains and cycles
    if (!(eps > 0.0)) throw PreconditionError("delta_for_epsilon: eps must be positive");
    const auto it = cert.grade_constants.find(alpha);
    if (it == cert.grade_constants.end()) {
        throw PreconditionError("delta_for_epsilon: the certificate carries no constants at this grade");
    }
    const GradeConstants& gc = it->second;
    DeltaForEps out;
    out.input_grade = gc.beta;
    out.c = gc.c;
    out.t = gc.t;
    out.d = cert.d;
    out.delta = (1.0 - gc.t) * eps / (3.0 * gc.c * cert.d);
    return out;
}

// --- Expansivity ---------------------------------------------------------------

namespace {

/// Log-space scan of one branch: value(n) = log( |orbit coefficient| * a(site_n, k) ),
/// where site_n = 1 + n*mu (forward) or 1 - n*mu (backward).
void scan_branch(const ShiftOperator& op, const KotheMatrix& A, int grade, bool forward,
                 std::int64_t horizon, BranchEvidence& ev) {
    const std::int64_t mu = op.motion();
    double cum = 0.0;
    double best = -kInf;
    std::int64_t argmax = 0;
    for (std::int64_t n = 0; n <= horizon; ++n) {
        const std::int64_t site = forward ? 1 + n * mu : 1 - n * mu;
        const double entry = A.entry(site, grade);
        if (entry > 0.0) {
            const double logq = cum + std::log(entry);
            if (logq > best) {
                best = logq;
                argmax = n;
            }
        }
        if (forward) {
            cum += std::log(std::fabs(op.factor(site)));
        } else {
            const std::int64_t next_site = 1 - (n + 1) * mu;
            cum -= std::log(std::fabs(op.factor(next_site)));
        }
    }
    ev.scan_log_sup = best;
    ev.scan_argmax = argmax;
}

BranchEvidence analyze_branch(const ShiftOperator& op, const KotheMatrix& A, int grade,
                              bool forward, std::int64_t horizon) {
    BranchEvidence ev;
    const std::int64_t mu = op.motion();
    const bool side_right = forward ? mu > 0 : mu < 0; // side the visited sites run into
    const TailClass wc = op.factor_class(side_right);
    const TailClass rc = A.row_class(grade, side_right);

    scan_branch(op, A, grade, forward, horizon, ev);

    std::ostringstream os;
    if (rc.is_zero()) {
        ev.analytic = true;
        ev.diverges = false;
        os << (forward ? "forward" : "backward")
           << " orbit support leaves the sites the seminorm can see; the values are eventually zero";
        ev.summary = os.str();
        return ev;
    }
    if (rc.is_unknown() || wc.is_unknown()) {
        ev.analytic = false;
        ev.diverges = ev.scan_log_sup > std::log(1e6);
        os << (forward ? "forward" : "backward")
           << " branch decided from the horizon scan only (no tail rule applies)";
        ev.summary = os.str();
        return ev;
    }
    // log of the cumulative factor product: the weight class contributes
    // exponent * (n log n - n) + log_coeff * n; the matrix row contributes
    // row_exponent * log n + O(1).  Signs flip for the inverse branch.
    const double sgn = forward ? 1.0 : -1.0;
    ev.slots.n_log_n = sgn * wc.exponent;
    ev.slots.linear = sgn * (wc.log_coeff - wc.exponent);
    ev.slots.log_n = rc.exponent;
    ev.analytic = true;
    ev.diverges = ev.slots.leading_sign() > 0;
    os << (forward ? "forward" : "backward") << " branch slots (n log n: " << ev.slots.n_log_n
       << ", n: " << ev.slots.linear << ", log n: " << ev.slots.log_n << ") -> "
       << (ev.diverges ? "diverges" : "stays bounded");
    ev.summary = os.str();
    return ev;
}

} // namespace

ExpansivityVerdict classify_expansivity_shift(const ShiftOperator& op, const SeminormFamily& fam,
                                              const std::vector<int>& grades,
                                              std::int64_t horizon) {
    if (grades.empty()) throw PreconditionError("classify_expansivity: at least one grade is required");
    if (horizon < 1) throw PreconditionError("classify_expansivity: horizon must be positive");
    const KotheMatrix& A = fam.effective_matrix();

    ExpansivityVerdict verdict;
    bool forward_any = false;
    bool inverse_any = false;
    bool all_analytic = true;
    int first_witness = 0;

    for (int k : grades) {
        if (k < 1) throw PreconditionError("grades are 1-based");
        GradeBranches gb;
        gb.grade = k;
        gb.forward = analyze_branch(op, A, k, true, horizon);
        gb.inverse = analyze_branch(op, A, k, false, horizon);
        all_analytic = all_analytic && gb.forward.analytic && gb.inverse.analytic;
        if ((gb.forward.diverges || gb.inverse.diverges) && first_witness == 0) first_witness = k;
        forward_any = forward_any || gb.forward.diverges;
        inverse_any = inverse_any || gb.inverse.diverges;
        verdict.evidence.push_back(std::move(gb));
    }

    if (forward_any && inverse_any) {
        verdict.kind = ExpansivityKind::Both;
    } else if (forward_any) {
        verdict.kind = ExpansivityKind::PositivelyExpansiveForward;
    } else if (inverse_any) {
        verdict.kind = ExpansivityKind::PositivelyExpansiveInverse;
    } else {
        verdict.kind = ExpansivityKind::NotExpansive;
    }
    verdict.witness_grade = first_witness;
    verdict.confidence = all_analytic ? ExpansivityVerdict::Confidence::Analytic
                                      : ExpansivityVerdict::Confidence::HorizonOnly;
    verdict.note = all_analytic
                       ? "every branch decided by the tail rules; the scans are corroborating traces"
                       : "at least one branch rests on the horizon scan alone";
    return verdict;
}

ExpansivityVerdict classify_expansivity_kothe(const WeightSequence& w, const KotheMatrix& A,
                                              double p, const std::vector<int>& grades,
                                              std::int64_t horizon) {
    return classify_expansivity_shift(make_forward_shift(w), SeminormFamily::kothe(A, p), grades,
                                      horizon);
}

// --- Uniform expansivity witness ------------------------------------------------

namespace {

/// Deficit (<= 1) for grade-matrix ratios along orbits that start on the
/// wrong side of zero: for polynomially graded rows, |j| can shrink for a few
/// steps before it grows again, and the worst case over all step counts is
/// 1/(|j0|+1)^k for the worst starting site j0.
double side_matrix_deficit(const KotheMatrix& A, int grade, std::int64_t worst_abs_site) {
    if (worst_abs_site <= 0) return 1.0;
    switch (A.kind) {
        case KotheMatrix::Kind::Constant: return 1.0;
        case KotheMatrix::Kind::PolynomialGrade:
            return ipow(1.0 / static_cast<double>(worst_abs_site + 1), grade);
        default: return 0.0; // never reached: the pattern route gates the kinds
    }
}

} // namespace

WitnessReport uniform_expansivity_witness(const std::optional<GHCertificate>& cert,
                                          const LinearOp& op, const SeminormFamily& fam,
                                          const std::vector<SeqVec>& samples, int grade, int n) {
    if (n < 1) throw PreconditionError("uniform_expansivity_witness: n must be positive");
    if (samples.empty()) {
        throw PreconditionError("uniform_expansivity_witness: at least one sample is required");
    }
    for (const SeqVec& x : samples) {
        const double s = seminorm_eval(fam, grade, x);
        if (std::fabs(s - 1.0) > 1e-9) {
            throw PreconditionError(
                "uniform_expansivity_witness: samples must lie on the unit sphere at the working "
                "grade");
        }
    }

    WitnessReport report;

    if (cert.has_value()) {
        const auto it = cert->grade_constants.find(grade);
        if (it == cert->grade_constants.end()) {
            throw PreconditionError(
                "uniform_expansivity_witness: the certificate carries no constants at this grade");
        }
        const GradeConstants& gc = it->second;
        report.route = "certificate";
        report.boundary = cert->split_boundary;
        report.rate = 1.0 / gc.t;
        report.bound = 1.0 / (2.0 * gc.c * cert->d * ipow(gc.t, n));
        if (!cert->trivial_splitting) {
            report.note =
                "nontrivial splittings certify growth only for mass that stays on one side of the "
                "boundary; failures below are informative, not contradictions";
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const SeqVec& x = samples[i];
            WitnessSample ws;
            ws.index = i;
            double proj_n, proj_m;
            switch (cert->orientation) {
                case SplitOrientation::AllContractsForward:
                    proj_m = seminorm_eval(fam, grade, x);
                    proj_n = 0.0;
                    break;
                case SplitOrientation::AllExpandsForward:
                    proj_n = seminorm_eval(fam, grade, x);
                    proj_m = 0.0;
                    break;
                default:
                    proj_n = seminorm_eval(fam, grade, project_n(*cert, x));
                    proj_m = seminorm_eval(fam, grade, project_m(*cert, x));
                    break;
            }
            ws.forward = proj_n >= proj_m; // the backward-contracting side grows forward
            ws.projection = ws.forward ? proj_n : proj_m;
            const SeqVec moved = op_iterate(op, x, ws.forward ? n : -n);
            ws.observed = seminorm_eval(fam, grade, moved);
            ws.bound = report.bound;
            ws.pass = ws.observed >= ws.bound;
            report.samples.push_back(ws);
        }
    } else {
        const auto* sh = std::get_if<ShiftOperator>(&op);
        if (sh == nullptr) {
            throw PreconditionError(
                "uniform_expansivity_witness: without a splitting the operator must be a weighted "
                "shift with the expanding-motion pattern");
        }
        const KotheMatrix& A = fam.effective_matrix();
        if (A.kind != KotheMatrix::Kind::Constant &&
            A.kind != KotheMatrix::Kind::PolynomialGrade) {
            throw PreconditionError(
                "uniform_expansivity_witness: the pattern route supports constant and polynomially "
                "graded rows only");
        }
        const bool motion_right = sh->motion() > 0;
        const TailRange mot = factor_tail_range(*sh, motion_right);
        const TailRange opp = factor_tail_range(*sh, !motion_right);
        double core_max = 0.0;
        for (std::int64_t j : core_factor_sites(*sh)) {
            core_max = std::max(core_max, std::fabs(sh->factor(j)));
        }
        const double rho = mot.inf;
        const double sigma = std::max(opp.sup, core_max);
        if (!(rho > 1.0) || !(sigma < 1.0)) {
            throw PreconditionError(
                "uniform_expansivity_witness: the factor pattern is not uniformly expanding along "
                "the motion with a contracting remainder");
        }
        const std::int64_t s = factor_tail_start(*sh, motion_right);
        const std::int64_t mu = sh->motion();
        // Worst matrix-ratio sites: motion-tail sites on the wrong side of zero
        // (forward) and complement sites on the motion side of zero (backward).
        const std::int64_t fwd_worst = mu > 0 ? (s < 0 ? -s : 0) : (s > 0 ? s : 0);
        const std::int64_t bwd_worst = mu > 0 ? (s - 1 > 0 ? s - 1 : 0) : (s + 1 < 0 ? -(s + 1) : 0);
        const double fwd_deficit = side_matrix_deficit(A, grade, fwd_worst);
        const double bwd_deficit = side_matrix_deficit(A, grade, bwd_worst);
        const double bound_fwd = ipow(rho, n) * fwd_deficit / 2.0;
        const double bound_bwd = ipow(1.0 / sigma, n) * bwd_deficit / 2.0;
        report.route = "expansive-pattern";
        report.boundary = s;
        report.rate = std::min(rho, 1.0 / sigma);
        report.bound = std::min(bound_fwd, bound_bwd);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const SeqVec& x = samples[i];
            WitnessSample ws;
            ws.index = i;
            SeqVec on_motion(x.window());
            SeqVec off_motion(x.window());
            for (const auto& [j, v] : x.coeffs()) {
                const bool motion_side = motion_right ? j >= s : j <= s;
                if (motion_side) {
                    on_motion.set(j, v);
                } else {
                    off_motion.set(j, v);
                }
            }
            const double proj_fwd = seminorm_eval(fam, grade, on_motion);
            const double proj_bwd = seminorm_eval(fam, grade, off_motion);
            ws.forward = proj_fwd >= proj_bwd;
            ws.projection = ws.forward ? proj_fwd : proj_bwd;
            const SeqVec moved = op_iterate(op, x, ws.forward ? n : -n);
            ws.observed = seminorm_eval(fam, grade, moved);
            ws.bound = ws.forward ? bound_fwd : bound_bwd;
            ws.pass = ws.observed >= ws.bound;
            report.samples.push_back(ws);
        }
    }

    report.all_pass = std::all_of(report.samples.begin(), report.samples.end(),
                                  [](const WitnessSample& ws) { return ws.pass; });
    return report;
}

// --- Orbit scans ----------------------------------------------------------------

namespace {

bool coeffs_within_guard(const SeqVec& x) {
    for (const auto& [j, v] : x.coeffs()) {
        (void)j;
        if (std::fabs(v) > kCoeffGuard) return false;
    }
    return true;
}

} // namespace

DoublingResult orbit_doubling_check(const LinearOp& op, const SeqVec& x, const SeminormFamily& fam,
                                    int grade, std::int64_t horizon) {
    if (horizon < 1) throw PreconditionError("orbit_doubling_check: horizon must be positive");
    const double base = seminorm_eval(fam, grade, x);
    if (!(base > 0.0)) {
        throw PreconditionError("orbit_doubling_check: the sample must have positive seminorm");
    }
    const LinearOp inv = op_inverse(op);
    SeqVec fwd = x;
    SeqVec bwd = x;
    bool fwd_alive = true;
    bool bwd_alive = true;
    for (std::int64_t m = 1; m <= horizon && (fwd_alive || bwd_alive); ++m) {
        if (fwd_alive) {
            fwd = op_apply(op, fwd);
            const double s = seminorm_eval(fam, grade, fwd);
            if (s >= 2.0 * base) return {true, m, s / base};
            fwd_alive = coeffs_within_guard(fwd);
        }
        if (bwd_alive) {
            bwd = op_apply(inv, bwd);
            const double s = seminorm_eval(fam, grade, bwd);
            if (s >= 2.0 * base) return {true, -m, s / base};
            bwd_alive = coeffs_within_guard(bwd);
        }
    }
    return {false, 0, 0.0};
}

OrbitScanResult orbit_scan(const LinearOp& op, const SeminormFamily& fam, int grade,
                           const SeqVec& x, int direction, std::int64_t steps,
                           std::optional<double> stop_bound) {
    if (direction != 1 && direction != -1) {
        throw PreconditionError("orbit_scan: direction must be +1 or -1");
    }
    if (steps < 0) throw PreconditionError("orbit_scan: steps must be nonnegative");
    const LinearOp stepper = direction > 0 ? op : op_inverse(op);
    OrbitScanResult res;
    SeqVec cur = x;
    res.values.push_back(seminorm_eval(fam, grade, cur));
    for (std::int64_t m = 1; m <= steps; ++m) {
        cur = op_apply(stepper, cur);
        // The seminorm can overflow before the raw coefficients do (lp powers
        // square them), so both are guarded before the value is recorded.
        const double s = seminorm_eval(fam, grade, cur);
        if (!std::isfinite(s) || !coeffs_within_guard(cur)) {
            res.truncated_overflow = true;
            break;
        }
        res.values.push_back(s);
        if (stop_bound.has_value() && s > *stop_bound) {
            res.stopped_at_bound = true;
            break;
        }
    }
    res.steps_completed = static_cast<std::int64_t>(res.values.size()) - 1;
    return res;
}

} // namespace shadowlab
