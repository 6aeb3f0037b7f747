#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/operators.hpp"
#include "shadowlab/spaces.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

/// Which part of the coordinate lattice forms the forward-contracting
/// subspace M.  N is always the complementary coordinate span.
///   UpperContractsForward: M = span{ e_j : j >= boundary }
///   LowerContractsForward: M = span{ e_j : j <= boundary }   (mirrored shifts)
///   AllContractsForward:   M = X, N = {0}                    (trivial)
///   AllExpandsForward:     M = {0}, N = X                    (trivial)
enum class SplitOrientation {
    UpperContractsForward,
    LowerContractsForward,
    AllContractsForward,
    AllExpandsForward,
};

/// Contraction data at one requested grade alpha: ||T^n y||_alpha <= c t^n ||y||_beta
/// for y in M, and the same bound for the restricted inverse on N.
struct GradeConstants {
    int beta = 1;
    double c = 1.0;
    double t = 0.5;

    bool operator==(const GradeConstants&) const = default;
};

/// A verified splitting certificate: X = M (+) N with forward contraction on M
/// and backward contraction on N at every requested grade.
struct GHCertificate {
    std::int64_t split_boundary = 0;
    SplitOrientation orientation = SplitOrientation::UpperContractsForward;
    std::map<int, GradeConstants> grade_constants;
    double d = 1.0; // projection bound; exactly 1 for coordinate splits
    bool trivial_splitting = false;
    std::string note; // formulas and scan ranges used to build the constants

    /// Does coordinate j belong to the forward-contracting side M?
    bool m_contains(std::int64_t j) const;

    bool operator==(const GHCertificate&) const = default;
};

/// Outcome of certificate detection: either a certificate or the reason none
/// is emitted.
struct SplitDetection {
    std::optional<GHCertificate> certificate;
    std::string reason;

    bool has_certificate() const { return certificate.has_value(); }
};

/// Detect a splitting for a weighted shift over the family, computing the
/// grade constants for every grade in `grades`.  Supported patterns: factor
/// magnitudes uniformly below 1 on both tails, uniformly above 1 on both
/// tails, or a single switch with the contracting regime on the side the
/// support moves toward.  Returns a reason otherwise (magnitude-1 tails,
/// expanding motion-side tails, unsupported matrix kinds).
SplitDetection detect_split(const ShiftOperator& op, const SeminormFamily& fam,
                            const std::vector<int>& grades);

/// Scalar multiples of the identity: |lambda| < 1 contracts everything,
/// |lambda| > 1 expands everything, |lambda| = 1 has no certificate.  The
/// constants are exact (c = 1) for every family by homogeneity.
SplitDetection certificate_for_scalar(const ScalarOperator& op, const std::vector<int>& grades);

/// Dispatch on the operator kind.
SplitDetection detect_split(const LinearOp& op, const SeminormFamily& fam,
                            const std::vector<int>& grades);

/// Coordinate projections onto the split's sides (windows preserved).
SeqVec project_m(const GHCertificate& cert, const SeqVec& x);
SeqVec project_n(const GHCertificate& cert, const SeqVec& x);

/// Constants at one grade, validated: throws when the grade is absent or the
/// rate is not strictly inside (0, 1).
const GradeConstants& certificate_constants(const GHCertificate& cert, int grade);

/// Series cutoff K with head * t^K <= tol, chosen as a multiple of t's
/// halving horizon so halving tol at least halves the reported tail bound.
std::int64_t geometric_cutoff(double head, double t, double tol);

enum class ShadowMode { Finite, Periodic };

/// The defect size delta that guarantees eps-shadowing at grade alpha.
struct DeltaForEps {
    int input_grade = 1; // grade at which pseudotrajectory defects are measured
    double delta = 0.0;
    double c = 1.0;
    double t = 0.5;
    double d = 1.0;
};

/// delta = (1 - t) eps / (3 c d) with (beta, c, t) the certificate constants
/// at grade alpha.  The same delta serves both finite chains and cycles.
DeltaForEps delta_for_epsilon(const GHCertificate& cert, double eps, int alpha, ShadowMode mode);

/// --- Expansivity -------------------------------------------------------------

enum class ExpansivityKind {
    NotExpansive,
    PositivelyExpansiveForward,
    PositivelyExpansiveInverse,
    Both,
    TopologicallyExpansive, // expansive without a positive direction; shift
                            // classification always refines to one of the
                            // positive kinds, so this is reserved for
                            // serialization compatibility
};

/// Evidence for one branch condition  sup_n (orbit coefficient of e_1) * (matrix
/// entry at the moved site) = infinity, decided from the tail classes and
/// accompanied by a log-space scan.
struct BranchEvidence {
    bool diverges = false;
    bool analytic = false;   // decided by tail rules, not by the scan
    GrowthSlots slots;       // log Q(n) = n_log_n * (n log n) + linear * n + log_n * log n + O(1)
    double scan_log_sup = 0.0;
    std::int64_t scan_argmax = 0;
    std::string summary;
};

struct GradeBranches {
    int grade = 1;
    BranchEvidence forward;
    BranchEvidence inverse;
};

struct ExpansivityVerdict {
    ExpansivityKind kind = ExpansivityKind::NotExpansive;
    enum class Confidence { Analytic, HorizonOnly, Inconclusive };
    Confidence confidence = Confidence::Analytic;
    int witness_grade = 0; // 0 when kind == NotExpansive
    std::vector<GradeBranches> evidence;
    std::string note;
};

/// Decide whether forward orbits (branch a) or inverse orbits (branch b) of a
/// basis vector diverge at any of the requested grades.  Analytic when the
/// tail rules decide; the horizon scan supplies the numeric trace.
ExpansivityVerdict classify_expansivity_shift(const ShiftOperator& op, const SeminormFamily& fam,
                                              const std::vector<int>& grades, std::int64_t horizon);

/// Same decision with the seminorms coming from a grade matrix directly.
ExpansivityVerdict classify_expansivity_kothe(const WeightSequence& w, const KotheMatrix& A,
                                              double p, const std::vector<int>& grades,
                                              std::int64_t horizon);

/// --- Uniform expansivity witness ---------------------------------------------

struct WitnessSample {
    std::size_t index = 0;
    bool forward = false;     // checked against the forward bound (side A) or backward (side B)
    double projection = 0.0;  // seminorm of the projection that decided the side
    double observed = 0.0;    // ||T^{+-n} x|| at the witness grade
    double bound = 0.0;
    bool pass = false;
};

struct WitnessReport {
    std::string route;       // "certificate" or "expansive-pattern"
    std::int64_t boundary = 0;
    double rate = 1.0;       // per-step growth factor underlying the bound
    double bound = 0.0;      // n-step lower bound each sample must beat
    bool all_pass = false;
    std::vector<WitnessSample> samples;
    std::string note;
};

/// Check the unit-sphere growth dichotomy at exponent n: every sample, split
/// by which side of the splitting carries at least half its seminorm, must
/// grow by `bound` forward or backward.  With a certificate the bound is
/// 1/(2 c d t^n); without one the operator must show the expanding-motion
/// pattern (motion-side tail uniformly above 1, rest uniformly below 1),
/// giving the bound rate^n / 2.
WitnessReport uniform_expansivity_witness(const std::optional<GHCertificate>& cert,
                                          const LinearOp& op, const SeminormFamily& fam,
                                          const std::vector<SeqVec>& samples, int grade, int n);

/// --- Orbit scans ---------------------------------------------------------------

struct DoublingResult {
    bool found = false;
    std::int64_t n = 0;
    double ratio = 0.0;
};

/// Least |n| in [-horizon, horizon] with ||T^n x||_k >= 2 ||x||_k (forward
/// checked before backward on ties).
DoublingResult orbit_doubling_check(const LinearOp& op, const SeqVec& x, const SeminormFamily& fam,
                                    int grade, std::int64_t horizon);

struct OrbitScanResult {
    std::vector<double> values; // ||T^{sign * m} x||_grade for m = 0..steps_completed
    std::int64_t steps_completed = 0;
    bool stopped_at_bound = false;
    bool truncated_overflow = false; // a coefficient left the guarded range
};

/// Seminorms along one orbit direction (+1 forward / -1 backward), stopping
/// early when `stop_bound` is exceeded or a coefficient grows past the
/// overflow guard.
OrbitScanResult orbit_scan(const LinearOp& op, const SeminormFamily& fam, int grade,
                           const SeqVec& x, int direction, std::int64_t steps,
                           std::optional<double> stop_bound);

} // namespace shadowlab
