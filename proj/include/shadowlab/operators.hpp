#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shadowlab/spaces.hpp"
#include "shadowlab/weights.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

/// Largest |n| accepted by iterate().
inline constexpr std::int64_t kMaxIterateSteps = 1'000'000;

enum class ShiftDirection { Forward, Backward };

/// A bilateral weighted shift.  With direction Forward the coefficient at
/// site j moves to j+1 multiplied by w_j; with Backward it moves to j-1
/// multiplied by w_j.  The `inverted` flag selects the exact inverse map
/// without rewriting the weight table (the inverse of a power-law tail is
/// not itself expressible as a tail rule, so the inverse is kept as a view).
struct ShiftOperator {
    ShiftDirection direction = ShiftDirection::Forward;
    WeightSequence weights;
    bool inverted = false;

    /// Net support motion per application: +1 or -1.
    std::int64_t motion() const {
        const std::int64_t base = direction == ShiftDirection::Forward ? 1 : -1;
        return inverted ? -base : base;
    }

    /// Multiplier applied to the coefficient at source site j.
    double factor(std::int64_t j) const;

    /// Index of the stored weight that factor(j) reads.
    std::int64_t weight_index(std::int64_t j) const;

    /// Exact |factor| behavior on one tail.
    TailClass factor_class(bool right_side) const;

    bool operator==(const ShiftOperator&) const = default;
};

/// Scalar multiple of the identity (lambda != 0).  Needed by the conjugacy
/// construction's closed-form cases.
struct ScalarOperator {
    double lambda = 2.0;
    bool operator==(const ScalarOperator&) const = default;
};

using LinearOp = std::variant<ShiftOperator, ScalarOperator>;

ShiftOperator make_forward_shift(WeightSequence w);
ShiftOperator make_backward_shift(WeightSequence w);

/// One application of the operator.  Shift windows translate with the motion.
SeqVec op_apply(const LinearOp& op, const SeqVec& x);
SeqVec op_apply(const ShiftOperator& op, const SeqVec& x);

/// The exact inverse operator.
LinearOp op_inverse(const LinearOp& op);
ShiftOperator shift_inverse(const ShiftOperator& op);

/// n-fold application; negative n iterates the inverse.  |n| is capped by
/// kMaxIterateSteps.
SeqVec op_iterate(const LinearOp& op, const SeqVec& x, std::int64_t n);

/// Rigorous bound for ||T x||_grade <= C * ||x||_grade over the family, from
/// the tail rules plus a finite scan.  +infinity when no bound exists at this
/// grade (or the data cannot decide one).
double op_norm_bound(const LinearOp& op, const SeminormFamily& fam, int grade);

/// --- Continuity and invertibility on a graded space -----------------------

enum class GradeConditionStatus { Witnessed, NoWitnessUpToMaxGrade, Inconclusive };

/// Outcome of one grade's continuity (or invertibility) condition: the least
/// witnessing grade m with sup_j of the defining ratio finite, if any.
struct GradeConditionVerdict {
    int grade = 1;
    GradeConditionStatus status = GradeConditionStatus::Inconclusive;
    int witness_m = 0;          // valid when status == Witnessed
    double sup_estimate = 0.0;  // numeric sup over the scan range at witness_m
                                // (or at max_grade when there is no witness)
    bool analytic = false;      // tails decided by rule, not merely scanned
    std::string note;
};

struct GradeConditionReport {
    std::vector<GradeConditionVerdict> per_grade;
    bool all_witnessed = false;
};

/// For every grade k <= max_grade, find the least m <= max_grade with
///   sup_j |w_j| a(j+1,k) / a(j,m) < infinity
/// (conventions: a(j,m) = 0 forces |w_j| a(j+1,k) = 0, and 0/0 counts as 1).
/// Tails are decided analytically from the rules; the numeric sup is scanned
/// over [-horizon, horizon].
GradeConditionReport kothe_well_defined(const WeightSequence& w, const KotheMatrix& A,
                                        int max_grade, std::int64_t horizon);

/// Same with the inverse ratio  a(j,k) / (|w_j| a(j+1,m)).
GradeConditionReport kothe_invertible(const WeightSequence& w, const KotheMatrix& A,
                                      int max_grade, std::int64_t horizon);

/// --- Multiplication operators over a finite site grid ----------------------

/// A multiplication operator on scalar functions over finitely many sites:
/// (M f)(s) = phi(s) f(s).  Only |phi| matters except at one optional marked
/// site where |phi| = 1 and a real unit phase (+1 or -1) is kept; the phase
/// feeds the adversarial chain construction.
struct MultiplicationOperator {
    std::vector<std::string> sites;
    std::vector<double> modulus;                 // |phi| per site, > 0
    std::optional<std::size_t> marked_site;      // requires modulus == 1 there
    double marked_phase = 1.0;                   // +1 or -1
    std::vector<std::pair<std::string, std::vector<std::size_t>>> compacts;

    double signed_value(std::size_t site) const {
        const double m = modulus.at(site);
        return (marked_site && *marked_site == site) ? marked_phase * m : m;
    }
};

void validate_multiplication(const MultiplicationOperator& op);

std::vector<double> mult_apply(const MultiplicationOperator& op,
                               const std::vector<double>& f);

/// Hyperbolicity verdict per declared compact: the contraction rate
/// t = max( max_{|phi|<1} |phi| , max_{|phi|>1} 1/|phi| ) over the compact,
/// or the list of sites with |phi| = 1 where the splitting degenerates.
struct CompactVerdict {
    std::string name;
    bool hyperbolic = false;
    double t = 0.0;
    std::vector<std::size_t> failing_sites;
};

std::vector<CompactVerdict> classify_multiplication(const MultiplicationOperator& op);

} // namespace shadowlab
