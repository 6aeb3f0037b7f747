#include "shadowlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <string>

namespace shadowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exponent comparisons below this threshold count as equal; exponents are
/// sums of user-supplied tail exponents and small integer grades.
constexpr double kExponentTie = 1e-12;

} // namespace

// --- ShiftOperator -----------------------------------------------------------

std::int64_t ShiftOperator::weight_index(std::int64_t j) const {
    if (!inverted) return j;
    return direction == ShiftDirection::Forward ? j - 1 : j + 1;
}

double ShiftOperator::factor(std::int64_t j) const {
    const double w = weights.value(weight_index(j));
    return inverted ? 1.0 / w : w;
}

TailClass ShiftOperator::factor_class(bool right_side) const {
    const TailRule& rule = right_side ? weights.right_tail() : weights.left_tail();
    TailClass c = rule.magnitude_class();
    return inverted ? c.reciprocal() : c;
}

ShiftOperator make_forward_shift(WeightSequence w) {
    ShiftOperator op;
    op.direction = ShiftDirection::Forward;
    op.weights = std::move(w);
    return op;
}

ShiftOperator make_backward_shift(WeightSequence w) {
    ShiftOperator op;
    op.direction = ShiftDirection::Backward;
    op.weights = std::move(w);
    return op;
}

SeqVec op_apply(const ShiftOperator& op, const SeqVec& x) {
    const std::int64_t m = op.motion();
    SeqVec out(x.window().translated(m));
    for (const auto& [j, v] : x.coeffs()) {
        const double prod = op.factor(j) * v;
        if (!std::isfinite(prod)) {
            throw OverflowError("shift application overflowed at site " + std::to_string(j));
        }
        out.set(j + m, prod);
    }
    return out;
}

SeqVec op_apply(const LinearOp& op, const SeqVec& x) {
    if (const auto* s = std::get_if<ShiftOperator>(&op)) return op_apply(*s, x);
    const auto& sc = std::get<ScalarOperator>(op);
    SeqVec out(x.window());
    for (const auto& [j, v] : x.coeffs()) {
        const double prod = sc.lambda * v;
        if (!std::isfinite(prod)) {
            throw OverflowError("scaling overflowed at site " + std::to_string(j));
        }
        out.set(j, prod);
    }
    return out;
}

ShiftOperator shift_inverse(const ShiftOperator& op) {
    ShiftOperator inv = op;
    inv.inverted = !op.inverted;
    return inv;
}

LinearOp op_inverse(const LinearOp& op) {
    if (const auto* s = std::get_if<ShiftOperator>(&op)) return shift_inverse(*s);
    const auto& sc = std::get<ScalarOperator>(op);
    if (sc.lambda == 0.0) throw PreconditionError("scalar operator with lambda = 0 has no inverse");
    return ScalarOperator{1.0 / sc.lambda};
}

SeqVec op_iterate(const LinearOp& op, const SeqVec& x, std::int64_t n) {
    if (n > kMaxIterateSteps || n < -kMaxIterateSteps) {
        throw PreconditionError("iterate count " + std::to_string(n) + " exceeds the cap " +
                                std::to_string(kMaxIterateSteps));
    }
    const LinearOp step = n >= 0 ? op : op_inverse(op);
    const std::int64_t count = n >= 0 ? n : -n;
    SeqVec y = x;
    for (std::int64_t i = 0; i < count; ++i) y = op_apply(step, y);
    return y;
}

// --- Ratio analysis ----------------------------------------------------------
//
// Both grade conditions and the per-grade operator bound reduce to deciding
//     sup_j  num(j) / den(j)  <  infinity
// for nonnegative quantities built from weight magnitudes and matrix entries.
// Tails are decided from the polynomial classes of the factors; a finite scan
// covers the region where tables and rules interact.

namespace {

/// How to read num(j)/den(j) when both vanish.  The grade conditions treat the
/// whole fraction as 1 there (the site imposes no constraint but is counted);
/// an operator bound skips the site entirely (it cannot carry mass).
enum class ZeroOverZero { One, Skip };

struct TailDecision {
    TailVerdict verdict = TailVerdict::Inconclusive;
    double limit_hint = 0.0; // lower estimate of the eventual sup when Bounded
};

TailDecision decide_tail(const TailClass& num, const TailClass& den, ZeroOverZero conv) {
    if (num.is_zero()) {
        const double hint = den.is_zero() && conv == ZeroOverZero::One ? 1.0 : 0.0;
        return {TailVerdict::Bounded, hint};
    }
    if (num.is_unknown() || den.is_unknown()) return {TailVerdict::Inconclusive, 0.0};
    if (den.is_zero()) return {TailVerdict::Unbounded, 0.0};
    const TailClass ratio = num.times(den.reciprocal());
    if (ratio.exponent > kExponentTie) return {TailVerdict::Unbounded, 0.0};
    if (ratio.exponent < -kExponentTie) return {TailVerdict::Bounded, 0.0};
    return {TailVerdict::Bounded, std::exp(ratio.log_coeff)};
}

struct RatioProblem {
    std::function<double(std::int64_t)> num;
    std::function<double(std::int64_t)> den;
    TailClass num_left, num_right, den_left, den_right;
    ZeroOverZero convention = ZeroOverZero::One;
};

struct RatioDecision {
    TailVerdict verdict = TailVerdict::Inconclusive;
    double sup = 0.0;    // +infinity when Unbounded
    bool analytic = false;
    std::optional<std::int64_t> violation_site;
};

RatioDecision analyze_ratio(const RatioProblem& pb, std::int64_t lo, std::int64_t hi) {
    RatioDecision out;
    double scan_sup = 0.0;
    for (std::int64_t j = lo; j <= hi; ++j) {
        const double n = std::fabs(pb.num(j));
        const double d = std::fabs(pb.den(j));
        double q;
        if (d == 0.0) {
            if (n == 0.0) {
                q = pb.convention == ZeroOverZero::One ? 1.0 : 0.0;
            } else {
                if (!out.violation_site) out.violation_site = j;
                q = kInf;
            }
        } else {
            q = n / d;
        }
        scan_sup = std::max(scan_sup, q);
    }

    const TailDecision left = decide_tail(pb.num_left, pb.den_left, pb.convention);
    const TailDecision right = decide_tail(pb.num_right, pb.den_right, pb.convention);
    out.analytic = left.verdict != TailVerdict::Inconclusive &&
                   right.verdict != TailVerdict::Inconclusive;

    if (out.violation_site || scan_sup == kInf || left.verdict == TailVerdict::Unbounded ||
        right.verdict == TailVerdict::Unbounded) {
        out.verdict = TailVerdict::Unbounded;
        out.sup = kInf;
        return out;
    }
    if (left.verdict == TailVerdict::Inconclusive || right.verdict == TailVerdict::Inconclusive) {
        out.verdict = TailVerdict::Inconclusive;
        out.sup = scan_sup;
        return out;
    }
    out.verdict = TailVerdict::Bounded;
    out.sup = std::max({scan_sup, left.limit_hint, right.limit_hint});
    return out;
}

/// Half-width that the finite scan must reach so every table, band, and core
/// boundary (plus one-site index offsets) lies inside it.
std::int64_t scan_halfwidth(const WeightSequence& w, const KotheMatrix& A, int max_grade,
                            std::int64_t horizon) {
    const auto abs64 = [](std::int64_t v) { return v < 0 ? -v : v; };
    std::int64_t s = std::max<std::int64_t>(horizon, 8);
    if (auto core = w.core()) {
        s = std::max({s, abs64(core->lo) + 2, abs64(core->hi) + 2});
    }
    switch (A.kind) {
        case KotheMatrix::Kind::BandIndicator:
            for (int k = 1; k <= max_grade; ++k) s = std::max(s, A.band(k) + 2);
            break;
        case KotheMatrix::Kind::Table:
            s = std::max({s, abs64(A.table_window.lo) + 2, abs64(A.table_window.hi) + 2});
            break;
        case KotheMatrix::Kind::WeightedConstant:
            if (auto core = A.weights.core()) {
                s = std::max({s, abs64(core->lo) + 2, abs64(core->hi) + 2});
            }
            break;
        default:
            break;
    }
    return s;
}

GradeConditionReport kothe_condition(const WeightSequence& w, const KotheMatrix& A,
                                     int max_grade, std::int64_t horizon,
                                     bool forward_condition) {
    if (max_grade < 1) throw PreconditionError("max_grade must be at least 1");
    if (horizon < 1) throw PreconditionError("horizon must be at least 1");

    const std::int64_t S = scan_halfwidth(w, A, max_grade, horizon);
    GradeConditionReport report;
    report.all_witnessed = true;

    for (int k = 1; k <= max_grade; ++k) {
        GradeConditionVerdict verdict;
        verdict.grade = k;
        bool saw_inconclusive = false;
        RatioDecision last{};
        for (int m = k; m <= max_grade; ++m) {
            RatioProblem pb;
            pb.convention = ZeroOverZero::One;
            if (forward_condition) {
                pb.num = [&w, &A, k](std::int64_t j) {
                    return std::fabs(w.value(j)) * A.entry(j + 1, k);
                };
                pb.den = [&A, m](std::int64_t j) { return A.entry(j, m); };
                for (bool right : {false, true}) {
                    const TailClass nc =
                        (right ? w.right_tail() : w.left_tail()).magnitude_class()
                            .times(A.row_class(k, right));
                    const TailClass dc = A.row_class(m, right);
                    (right ? pb.num_right : pb.num_left) = nc;
                    (right ? pb.den_right : pb.den_left) = dc;
                }
            } else {
                pb.num = [&A, k](std::int64_t j) { return A.entry(j, k); };
                pb.den = [&w, &A, m](std::int64_t j) {
                    return std::fabs(w.value(j)) * A.entry(j + 1, m);
                };
                for (bool right : {false, true}) {
                    const TailClass nc = A.row_class(k, right);
                    const TailClass dc =
                        (right ? w.right_tail() : w.left_tail()).magnitude_class()
                            .times(A.row_class(m, right));
                    (right ? pb.num_right : pb.num_left) = nc;
                    (right ? pb.den_right : pb.den_left) = dc;
                }
            }
            last = analyze_ratio(pb, -S, S);
            if (last.verdict == TailVerdict::Bounded) {
                verdict.status = GradeConditionStatus::Witnessed;
                verdict.witness_m = m;
                verdict.sup_estimate = last.sup;
                verdict.analytic = last.analytic;
                break;
            }
            if (last.verdict == TailVerdict::Inconclusive) saw_inconclusive = true;
        }
        if (verdict.status != GradeConditionStatus::Witnessed) {
            verdict.status = saw_inconclusive ? GradeConditionStatus::Inconclusive
                                              : GradeConditionStatus::NoWitnessUpToMaxGrade;
            verdict.witness_m = 0;
            verdict.sup_estimate = last.sup;
            verdict.analytic = last.analytic;
            verdict.note = saw_inconclusive
                               ? "tail behavior not decidable from the stored rules"
                               : "ratio stays unbounded for every m up to the grade limit";
            report.all_witnessed = false;
        }
        report.per_grade.push_back(std::move(verdict));
    }
    return report;
}

} // namespace

GradeConditionReport kothe_well_defined(const WeightSequence& w, const KotheMatrix& A,
                                        int max_grade, std::int64_t horizon) {
    return kothe_condition(w, A, max_grade, horizon, /*forward_condition=*/true);
}

GradeConditionReport kothe_invertible(const WeightSequence& w, const KotheMatrix& A,
                                      int max_grade, std::int64_t horizon) {
    return kothe_condition(w, A, max_grade, horizon, /*forward_condition=*/false);
}

double op_norm_bound(const LinearOp& op, const SeminormFamily& fam, int grade) {
    if (grade < 1) throw PreconditionError("grade must be at least 1");
    if (const auto* sc = std::get_if<ScalarOperator>(&op)) return std::fabs(sc->lambda);

    const auto& sh = std::get<ShiftOperator>(op);
    const KotheMatrix& A = fam.effective_matrix();
    const std::int64_t m = sh.motion();
    const std::int64_t S = scan_halfwidth(sh.weights, A, grade, /*horizon=*/512);

    RatioProblem pb;
    pb.convention = ZeroOverZero::Skip;
    pb.num = [&sh, &A, m, grade](std::int64_t j) {
        return std::fabs(sh.factor(j)) * A.entry(j + m, grade);
    };
    pb.den = [&A, grade](std::int64_t j) { return A.entry(j, grade); };
    for (bool right : {false, true}) {
        const TailClass nc = sh.factor_class(right).times(A.row_class(grade, right));
        const TailClass dc = A.row_class(grade, right);
        (right ? pb.num_right : pb.num_left) = nc;
        (right ? pb.den_right : pb.den_left) = dc;
    }
    const RatioDecision d = analyze_ratio(pb, -S, S);
    return d.verdict == TailVerdict::Bounded ? d.sup : kInf;
}

// --- Multiplication operators -----------------------------------------------

void validate_multiplication(const MultiplicationOperator& op) {
    if (op.sites.empty()) throw PreconditionError("multiplication operator needs at least one site");
    if (op.modulus.size() != op.sites.size()) {
        throw PreconditionError("modulus list must match the site list");
    }
    for (std::size_t i = 0; i < op.modulus.size(); ++i) {
        if (!std::isfinite(op.modulus[i]) || op.modulus[i] <= 0.0) {
            throw PreconditionError("modulus at site " + std::to_string(i) +
                                    " must be finite and positive");
        }
    }
    if (op.marked_site) {
        if (*op.marked_site >= op.sites.size()) {
            throw PreconditionError("marked site index out of range");
        }
        if (op.modulus[*op.marked_site] != 1.0) {
            throw PreconditionError("the marked site must carry modulus exactly 1");
        }
        if (op.marked_phase != 1.0 && op.marked_phase != -1.0) {
            throw PreconditionError("the marked phase must be +1 or -1");
        }
    }
    std::set<std::string> names;
    for (const auto& [name, members] : op.compacts) {
        if (members.empty()) {
            throw PreconditionError("compact '" + name + "' must list at least one site");
        }
        if (!names.insert(name).second) {
            throw PreconditionError("duplicate compact name '" + name + "'");
        }
        for (std::size_t s : members) {
            if (s >= op.sites.size()) {
                throw PreconditionError("compact '" + name + "' references a site out of range");
            }
        }
    }
}

std::vector<double> mult_apply(const MultiplicationOperator& op, const std::vector<double>& f) {
    if (f.size() != op.sites.size()) {
        throw PreconditionError("function vector length must match the site list");
    }
    std::vector<double> out(f.size());
    for (std::size_t s = 0; s < f.size(); ++s) out[s] = op.signed_value(s) * f[s];
    return out;
}

std::vector<CompactVerdict> classify_multiplication(const MultiplicationOperator& op) {
    validate_multiplication(op);
    std::vector<CompactVerdict> verdicts;
    verdicts.reserve(op.compacts.size());
    for (const auto& [name, members] : op.compacts) {
        CompactVerdict v;
        v.name = name;
        double rate = 0.0;
        for (std::size_t s : members) {
            const double m = op.modulus[s];
            if (m == 1.0) {
                v.failing_sites.push_back(s);
            } else {
                rate = std::max(rate, m < 1.0 ? m : 1.0 / m);
            }
        }
        v.hyperbolic = v.failing_sites.empty();
        v.t = v.hyperbolic ? rate : 0.0;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

} // namespace shadowlab
