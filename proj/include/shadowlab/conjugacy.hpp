#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "shadowlab/hyperbolicity.hpp"
#include "shadowlab/operators.hpp"
#include "shadowlab/spaces.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

/// g(x) = value for every x.
struct ConstantPerturbation {
    SeqVec value;

    bool operator==(const ConstantPerturbation&) const = default;
};

/// One coordinate's response curve: piecewise-linear through the
/// (inputs[i], outputs[i]) nodes, constant beyond the first and last node.
/// `inputs` must be strictly increasing; both vectors have the same size >= 1.
struct SiteResponse {
    std::vector<double> inputs;
    std::vector<double> outputs;

    bool operator==(const SiteResponse&) const = default;
};

/// g(x) = sum over listed sites s of f_s(x[s]) * e_s, where each f_s is the
/// site's response curve.  Bounded by construction (curves are constant
/// outside their node range) with an exact coordinatewise Lipschitz constant.
struct TablePerturbation {
    std::map<std::int64_t, SiteResponse> response;

    bool operator==(const TablePerturbation&) const = default;
};

using Perturbation = std::variant<ConstantPerturbation, TablePerturbation>;

/// S = base + g: a bounded (generally nonlinear) perturbation of an
/// invertible linear operator.
struct PerturbedMap {
    LinearOp base;
    Perturbation g;
};

/// Throws ConfigError when the perturbation data is malformed (size
/// mismatch, non-increasing inputs, non-finite entries).
void validate_perturbation(const Perturbation& g);

/// g(x).
SeqVec perturbation_eval(const Perturbation& g, const SeqVec& x);

/// sup over x of ||g(x)||_grade.  Exact: the coordinatewise worst outputs
/// are attained simultaneously.  May be +infinity (reported, not thrown).
double perturbation_bound(const Perturbation& g, const SeminormFamily& fam, int grade);

/// Smallest L with |g(x)[s] - g(y)[s]| <= L |x[s] - y[s]| at every site.
/// The coordinatewise constant transfers to every solid seminorm in use.
double perturbation_lipschitz(const Perturbation& g);

/// -g (same shape).
Perturbation perturbation_negate(const Perturbation& g);

/// S(x) = base(x) + g(x).
SeqVec perturbed_apply(const PerturbedMap& S, const SeqVec& x);

/// Solve S(x) = y by the fixed-point iteration x <- base^{-1}(y - g(x)),
/// starting from base^{-1}(y), stopping once the step seminorm falls below
/// `tol`.  Requires the contraction condition
///   perturbation_lipschitz(g) * ||base^{-1}||_grade < 1
/// (checked up front unless the Lipschitz constant is exactly zero, in which
/// case one corrective step is already exact).
SeqVec invert_perturbed(const PerturbedMap& S, const SeqVec& y, const SeminormFamily& fam,
                        int grade, double tol);

/// Truncated evaluation of the inverse of the conjugation operator
/// phi |-> phi o R - base o phi at a bounded map phi:
///
///   value = sum_{k=0}^{K} base^k  P_M(phi(R^{-k-1} x))
///         - sum_{k=1}^{K} base^{-k} P_N(phi(R^{ k-1} x))
///
/// with K chosen so the dropped tails are below `tol`:
/// c d B t^K / (1 - t) <= tol, where B bounds ||phi|| at the working grade.
struct SeriesResult {
    SeqVec value;
    std::int64_t cutoff = 0;       ///< K, the last retained power.
    double truncation_bound = 0.0; ///< Seminorm bound on the dropped tails.
};

SeriesResult psi_inverse(const Perturbation& phi, const PerturbedMap& R,
                         const GHCertificate& cert, const SeqVec& x,
                         const SeminormFamily& fam, int grade, double tol);

/// Largest allowed perturbation bound sup||g|| that keeps the conjugacy
/// displacement ||phi(x) - x|| below eps at grade alpha: (1-t) eps / (2 c d).
double conjugacy_delta(const GHCertificate& cert, double eps, int alpha);

/// phi(x) for the map phi = id + (conjugation inverse applied to -g), which
/// intertwines base o phi = phi o S up to the reported defect bounds.
struct ConjugacyPoint {
    SeqVec phi_x;
    double displacement = 0.0;     ///< ||phi(x) - x||_grade.
    std::int64_t cutoff = 0;       ///< Series cutoff K used.
    double truncation_bound = 0.0; ///< Distance to the untruncated series value.
    /// Bound on ||base(phi(x)) - phi(S(x))||_grade: truncating both series at
    /// K leaves a defect of exactly two terms, one contracted K+1 times
    /// forward and one K times backward, so the defect seminorm is at most
    /// c d B t^K (1 + t).  Exact-orbit arithmetic is assumed; constant
    /// perturbations never consult the orbit, so for them the bound is
    /// unconditional.
    double residual_bound = 0.0;
};

ConjugacyPoint conjugacy_map(const PerturbedMap& S, const GHCertificate& cert, const SeqVec& x,
                             const SeminormFamily& fam, int grade, double tol);

/// Measured max over samples of ||base(phi(x)) - phi(S(x))||_grade for any
/// candidate phi.  Pure measurement; no bound is assumed.
struct SemiconjugacyReport {
    std::vector<double> residuals;
    double max_residual = 0.0;
};

SemiconjugacyReport verify_semiconjugacy(const LinearOp& base, const PerturbedMap& S,
                                         const std::function<SeqVec(const SeqVec&)>& phi,
                                         const std::vector<SeqVec>& samples,
                                         const SeminormFamily& fam, int grade);

/// One radial stage: inside the ball of `radius` around `center` (measured by
/// the owning homeomorphism's seminorm), a point at relative distance s moves
/// radially so that u = 1 + k s is taken to the piecewise-linear profile
/// through (1,1), (u_mid, phi_mid), (1+k, 1+k); outside the ball, and on the
/// seminorm's null fiber through the center, the stage is the identity.
/// `inverted` applies the inverse map in the forward pass.
struct RadialStage {
    SeqVec center;
    double radius = 1.0;
    std::int64_t k = 1;
    double u_mid = 1.0;
    double phi_mid = 1.0;
    bool inverted = false;
};

/// A homeomorphism of the whole sequence space, equal to the identity
/// outside the ball of `radius` around `center`, assembled from radial
/// stages whose own balls nest inside that ball.
struct BallHomeo {
    SeminormFamily fam;
    int grade = 1;
    SeqVec center;
    double radius = 1.0;
    std::vector<RadialStage> stages;
};

/// A homeomorphism h with h(a) = b and h = id outside the ball of radius r
/// around x0 (all distances in fam/grade).  Both endpoints must lie strictly
/// inside the ball.  When b - x0 is a positive multiple of a - x0
/// coefficientwise and ||a - x0|| > 0, a single stage centered at x0 is used
/// and h additionally fixes every point whose distance to x0 vanishes.
/// Otherwise two stages route both endpoints through a common hub; if either
/// endpoint's distance to x0 vanishes, the hub is first displaced along a
/// coordinate outside both supports so that both distances become positive.
BallHomeo radial_homeo(const SeqVec& x0, double r, const SeminormFamily& fam, int grade,
                       const SeqVec& a, const SeqVec& b);

/// Composition of radial_homeo maps through consecutive waypoints (all
/// strictly inside the ball): the result sends the first waypoint to the
/// last and is the identity outside the ball.
BallHomeo radial_homeo_chain(const SeqVec& x0, double r, const SeminormFamily& fam, int grade,
                             const std::vector<SeqVec>& waypoints);

SeqVec radial_homeo_apply(const BallHomeo& h, const SeqVec& x);
SeqVec radial_homeo_inverse_apply(const BallHomeo& h, const SeqVec& y);

} // namespace shadowlab
