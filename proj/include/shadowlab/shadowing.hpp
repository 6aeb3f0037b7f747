#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shadowlab/hyperbolicity.hpp"
#include "shadowlab/operators.hpp"
#include "shadowlab/spaces.hpp"

namespace shadowlab {

/// A finite pseudotrajectory: points x_r with cached defects
///   y_r = x_{r+1} - T x_r            (open chain: one defect per step)
///   y_r = x_{(r+1) mod p} - T x_r    (cycle: the last defect closes it)
/// The time index of points[r] is r - origin; chains and cycles keep
/// origin = 0, two-sided segments put it in the middle.  Defects are measured
/// at `grade` and must not exceed `delta` there.
struct Pseudotrajectory {
    std::vector<SeqVec> points;
    std::vector<SeqVec> defects;
    int grade = 1;
    double delta = 0.0;
    bool periodic = false;
    std::int64_t origin = 0;
};

struct PseudoValidation {
    bool ok = true;
    double max_defect = 0.0;
    double worst_excess = 0.0; // max_defect - delta when positive
    std::string message;
};

/// Structural check: shape, origin, cached defects identical to re-derived
/// ones, and every defect within the declared budget (inclusively: the
/// boundary failure construction attains it exactly).
PseudoValidation validate_pseudotrajectory(const Pseudotrajectory& pt, const LinearOp& op,
                                           const SeminormFamily& fam);

/// Random delta-chain of `length` steps from x0: each step applies the
/// operator and adds a perturbation of seminorm uniform in
/// [0.2, 0.9] * delta * perturbation_scale, drawn coordinatewise on the union
/// of the adjacent supports.  perturbation_scale = 0 gives the exact orbit.
Pseudotrajectory make_chain(const LinearOp& op, const SeminormFamily& fam, const SeqVec& x0,
                            std::int64_t length, int grade, double delta, std::uint64_t seed,
                            double perturbation_scale = 1.0);

/// Random delta-cycle of the given period: a randomly perturbed segment is
/// closed by a final defect, and the whole cycle is rescaled (linearly, so
/// defects scale with it) until the worst defect measures 0.9 * delta.
Pseudotrajectory make_cycle(const LinearOp& op, const SeminormFamily& fam, const SeqVec& x0,
                            std::int64_t period, int grade, double delta, std::uint64_t seed,
                            double perturbation_scale = 1.0);

/// Symmetric two-sided segment x_{-m} .. x_m around x0 (origin = m), built
/// like make_chain in both time directions.
Pseudotrajectory make_two_sided(const LinearOp& op, const SeminormFamily& fam, const SeqVec& x0,
                                std::int64_t m, int grade, double delta, std::uint64_t seed,
                                double perturbation_scale = 1.0);

struct ShadowReport {
    SeqVec shadow_point;
    // ||x_r - T^{r-origin} shadow|| per point, evaluated through the defect
    // series that defines the shadow orbit (contraction-only recurrences);
    // iterating shadow_point forward instead amplifies its roundoff
    // exponentially along the expanding side.
    std::vector<double> deviations;
    double max_deviation = 0.0;
    double bound_used = 0.0;             // deviation budget implied by the constants
    double periodic_residual = 0.0;      // ||T^p shadow - shadow|| for cycles
    double residual_bound = 0.0;         // analytic cap on the residual
    double truncation_tolerance = 0.0;   // tol driving the series cutoff
    std::int64_t series_terms = 0;       // largest operator exponent kept
};

/// Finite shadowing: the correcting series is a finite sum, so the result is
/// exact up to roundoff and max_deviation obeys 2 c d delta / (1 - t).
ShadowReport shadow_finite(const Pseudotrajectory& chain, const GHCertificate& cert,
                           const LinearOp& op, const SeminormFamily& fam);

/// Periodic shadowing: the correcting series is truncated once its geometric
/// tail falls below tol; the report carries the measured residual
/// ||T^p x - x|| together with its analytic cap (a fixed multiple of tol),
/// and max_deviation obeys 3 c d delta / (1 - t).  Halving tol at least
/// halves the residual cap.
ShadowReport shadow_periodic(const Pseudotrajectory& cycle, const GHCertificate& cert,
                             const LinearOp& op, const SeminormFamily& fam, double tol);

/// Two-sided shadowing for a segment around time zero; the deviation budget
/// is 3 b c d delta / (1 - t) with b a bound for the inverse at the working
/// grade.
ShadowReport shadow_two_sided(const Pseudotrajectory& pseudo, const GHCertificate& cert,
                              const LinearOp& op, const SeminormFamily& fam, double tol);

struct VerifyResult {
    std::vector<double> deviations;
    double max_deviation = 0.0;
    double max_defect_mismatch = 0.0; // cached vs re-derived defects
    bool defects_consistent = false;
};

/// Pure measurement: deviations of a candidate shadow point against every
/// pseudotrajectory point, plus a re-derivation check of the cached defects.
VerifyResult verify_shadowing(const Pseudotrajectory& pt, const SeqVec& candidate,
                              const LinearOp& op, const SeminormFamily& fam, int grade);

/// A delta-cycle that no genuine orbit shadows: the ramp rides a backward
/// shift whose only periodic point is zero while the cycle climbs to
/// sup-distance > 1 from the zero orbit.
struct CounterexampleReport {
    Pseudotrajectory cycle;
    ShiftOperator op;
    SeminormFamily fam;
    std::int64_t n = 0;     // ramp height index: peak = 2^n * delta
    double peak = 0.0;      // largest point seminorm along the cycle
    double separation = 0.0; // sup-distance of the cycle from the zero orbit
    std::string argument;   // why no periodic point can shadow it
};

CounterexampleReport counterexample_cycle(double delta);

/// Adversarial chain for a multiplication operator with a marked unit-modulus
/// site: each step adds a constant defect of sup-norm delta, yet the values
/// at the marked site grow linearly and escape every bounded set.
struct AdversarialChain {
    std::vector<std::vector<double>> functions; // f_0 = 0, f_1, ..., f_steps
    std::vector<double> defect_sups;            // one per step, identically delta
    double delta = 0.0;
    std::int64_t escape_index = -1; // least j with |f_j(marked)| >= 2, or -1
    std::string note;
};

AdversarialChain adversarial_mult_chain(const MultiplicationOperator& op, double delta,
                                        std::int64_t steps);

} // namespace shadowlab
