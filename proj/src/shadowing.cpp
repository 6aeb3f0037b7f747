#include "shadowlab/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shadowlab/errors.hpp"
#include "shadowlab/rng.hpp"

namespace shadowlab {

namespace {

SeqVec zero_vec() { return SeqVec(IndexWindow(0, 0)); }

/// Random direction on the union of the supports of the given vectors,
/// rescaled to the target seminorm; zero when the seminorm cannot see the
/// support (then the step simply follows the operator).
SeqVec random_perturbation(Rng& rng, const SeminormFamily& fam, int grade, double target,
                           const SeqVec& a, const SeqVec& b) {
    IndexWindow w(0, 0);
    const auto sa = a.support();
    const auto sb = b.support();
    if (sa && sb) {
        w = IndexWindow::hull(*sa, *sb);
    } else if (sa) {
        w = *sa;
    } else if (sb) {
        w = *sb;
    }
    SeqVec dir(w);
    for (std::int64_t j = w.lo; j <= w.hi; ++j) {
        dir.set(j, rng.uniform(-1.0, 1.0));
    }
    const double norm = seminorm_eval(fam, grade, dir);
    if (!(norm > 0.0) || !std::isfinite(norm)) return SeqVec(w);
    return vec_scale(target / norm, dir);
}

/// Re-derive every defect from the points so cached and recomputed values are
/// bit-identical under later verification.
void derive_defects(Pseudotrajectory& pt, const LinearOp& op) {
    pt.defects.clear();
    const std::size_t p = pt.points.size();
    const std::size_t steps = pt.periodic ? p : p - 1;
    pt.defects.reserve(steps);
    for (std::size_t r = 0; r < steps; ++r) {
        const SeqVec& next = pt.points[(r + 1) % p];
        pt.defects.push_back(vec_sub(next, op_apply(op, pt.points[r])));
    }
}

double max_defect_norm(const Pseudotrajectory& pt, const SeminormFamily& fam) {
    double m = 0.0;
    for (const SeqVec& y : pt.defects) {
        m = std::max(m, seminorm_eval(fam, pt.grade, y));
    }
    return m;
}

/// Deviations of the series-defined shadow orbit against the
/// pseudotrajectory.  The deviation at time r splits as d_r = M_r - N_r with
///   M_r = sum over past defects   T^(r-1-k) P_M y_k,
///   N_r = sum over future defects T^(r-1-k) P_N y_k,
/// so the M accumulator only ever applies T to the side it contracts and the
/// N accumulator only ever applies T^(-1) to the side that contracts; both
/// recurrences are contraction-only and numerically stable.  (Iterating the
/// returned snapshot forward instead would amplify its roundoff
/// exponentially along the expanding side.)  At time 0 the split sums
/// reproduce x_0 minus the constructed shadow point exactly, so these are
/// the deviations of the reported point's analytic orbit.  For cycles the
/// bi-infinite periodic sums keep `wrap_terms` + 1 past and `wrap_terms`
/// future defects, matching the shadow point's own truncation.
std::vector<double> series_deviations(const Pseudotrajectory& pt, const GHCertificate& cert,
                                      const LinearOp& op, const SeminormFamily& fam,
                                      std::int64_t wrap_terms) {
    const auto count = static_cast<std::int64_t>(pt.points.size());
    const LinearOp inv = op_inverse(op);
    std::vector<SeqVec> mpart(static_cast<std::size_t>(count), zero_vec());
    std::vector<SeqVec> npart(static_cast<std::size_t>(count), zero_vec());
    if (!pt.periodic) {
        SeqVec a = zero_vec(); // M_r, advanced by M_{r+1} = T M_r + P_M y_r
        for (std::int64_t r = 0; r < count; ++r) {
            mpart[static_cast<std::size_t>(r)] = a;
            if (r + 1 < count) {
                a = vec_axpy(1.0, project_m(cert, pt.defects[static_cast<std::size_t>(r)]),
                             op_apply(op, a));
            }
        }
        SeqVec b = zero_vec(); // N_r, rewound by N_{r-1} = T^(-1)(P_N y_{r-1} + N_r)
        for (std::int64_t r = count - 1; r >= 0; --r) {
            npart[static_cast<std::size_t>(r)] = b;
            if (r >= 1) {
                b = op_apply(inv,
                             vec_axpy(1.0, project_n(cert, pt.defects[static_cast<std::size_t>(r - 1)]),
                                      b));
            }
        }
    } else {
        const auto p = static_cast<std::int64_t>(pt.defects.size());
        const auto wrap = [p](std::int64_t k) { return static_cast<std::size_t>(((k % p) + p) % p); };
        for (std::int64_t r = 0; r < count; ++r) {
            SeqVec a = zero_vec(); // sum_{j=0..wrap_terms} T^j P_M y_{r-1-j}
            for (std::int64_t j = wrap_terms; j >= 0; --j) {
                a = vec_axpy(1.0, project_m(cert, pt.defects[wrap(r - 1 - j)]), op_apply(op, a));
            }
            mpart[static_cast<std::size_t>(r)] = a;
            SeqVec b = zero_vec(); // sum_{j=0..wrap_terms-1} T^(-1-j) P_N y_{r+j}
            for (std::int64_t j = wrap_terms - 1; j >= 0; --j) {
                b = op_apply(inv, vec_axpy(1.0, project_n(cert, pt.defects[wrap(r + j)]), b));
            }
            npart[static_cast<std::size_t>(r)] = b;
        }
    }
    std::vector<double> devs(static_cast<std::size_t>(count), 0.0);
    for (std::int64_t r = 0; r < count; ++r) {
        devs[static_cast<std::size_t>(r)] =
            seminorm_eval(fam, pt.grade,
                          vec_sub(mpart[static_cast<std::size_t>(r)],
                                  npart[static_cast<std::size_t>(r)]));
    }
    return devs;
}

std::vector<double> deviation_sweep(const Pseudotrajectory& pt, const SeqVec& candidate,
                                    const LinearOp& op, const SeminormFamily& fam, int grade) {
    const std::int64_t count = static_cast<std::int64_t>(pt.points.size());
    std::vector<double> devs(pt.points.size(), 0.0);
    // forward sweep: time indices 0, 1, 2, ... relative to the origin
    SeqVec cur = candidate;
    for (std::int64_t r = pt.origin; r < count; ++r) {
        devs[static_cast<std::size_t>(r)] =
            seminorm_eval(fam, grade, vec_sub(pt.points[static_cast<std::size_t>(r)], cur));
        if (r + 1 < count) cur = op_apply(op, cur);
    }
    // backward sweep: time indices -1, -2, ...
    if (pt.origin > 0) {
        const LinearOp inv = op_inverse(op);
        cur = candidate;
        for (std::int64_t r = pt.origin - 1; r >= 0; --r) {
            cur = op_apply(inv, cur);
            devs[static_cast<std::size_t>(r)] =
                seminorm_eval(fam, grade, vec_sub(pt.points[static_cast<std::size_t>(r)], cur));
        }
    }
    return devs;
}

} // namespace

PseudoValidation validate_pseudotrajectory(const Pseudotrajectory& pt, const LinearOp& op,
                                           const SeminormFamily& fam) {
    PseudoValidation v;
    const std::size_t p = pt.points.size();
    if (p == 0) {
        v.ok = false;
        v.message = "a pseudotrajectory needs at least one point";
        return v;
    }
    const std::size_t expected = pt.periodic ? p : p - 1;
    if (pt.defects.size() != expected) {
        v.ok = false;
        std::ostringstream os;
        os << "defect count " << pt.defects.size() << " does not match the expected " << expected;
        v.message = os.str();
        return v;
    }
    if (pt.periodic && pt.origin != 0) {
        v.ok = false;
        v.message = "cycles keep their origin at index zero";
        return v;
    }
    if (pt.origin < 0 || static_cast<std::size_t>(pt.origin) >= p) {
        v.ok = false;
        v.message = "the origin must point at one of the stored points";
        return v;
    }
    if (pt.grade < 1) {
        v.ok = false;
        v.message = "grades are 1-based";
        return v;
    }
    double mismatch = 0.0;
    for (std::size_t r = 0; r < expected; ++r) {
        const SeqVec rederived = vec_sub(pt.points[(r + 1) % p], op_apply(op, pt.points[r]));
        const SeqVec diff = vec_sub(pt.defects[r], rederived);
        for (const auto& [j, val] : diff.coeffs()) {
            (void)j;
            mismatch = std::max(mismatch, std::fabs(val));
        }
    }
    if (mismatch > 0.0) {
        v.ok = false;
        std::ostringstream os;
        os << "cached defects disagree with the points by up to " << mismatch;
        v.message = os.str();
        return v;
    }
    v.max_defect = max_defect_norm(pt, fam);
    if (v.max_defect > pt.delta) {
        v.ok = false;
        v.worst_excess = v.max_defect - pt.delta;
        std::ostringstream os;
        os << "a defect measures " << v.max_defect << ", above the declared budget " << pt.delta;
        v.message = os.str();
        return v;
    }
    v.message = "ok";
    return v;
}

Pseudotrajectory make_chain(const LinearOp& op, const SeminormFamily& fam, const SeqVec& x0,
                            std::int64_t length, int grade, double delta, std::uint64_t seed,
                            double perturbation_scale) {
    if (length < 1) throw PreconditionError("make_chain: length must be positive");
    if (grade < 1) throw PreconditionError("grades are 1-based");
    if (!(delta > 0.0)) throw PreconditionError("make_chain: delta must be positive");
    if (perturbation_scale < 0.0 || perturbation_scale > 1.0) {
        throw PreconditionError("make_chain: the perturbation scale lies in [0, 1]");
    }
    Rng rng(seed);
    Pseudotrajectory pt;
    pt.grade = grade;
    pt.delta = delta;
    pt.periodic = false;
    pt.origin = 0;
    pt.points.push_back(x0);
    for (std::int64_t j = 0; j < length; ++j) {
        const SeqVec tx = op_apply(op, pt.points.back());
        SeqVec next = tx;
        if (perturbation_scale > 0.0) {
            const double target = rng.uniform(0.2, 0.9) * delta * perturbation_scale;
            const SeqVec r = random_perturbation(rng, fam, grade, target, tx, pt.points.back());
            next = vec_axpy(1.0, r, tx);
        }
        pt.points.push_back(next);
    }
    derive_defects(pt, op);
    return pt;
}

Pseudotrajectory make_cycle(const LinearOp& op, const SeminormFamily& fam, const SeqVec& x0,
                            std::int64_t period, int grade, double delta, std::uint64_t seed,
                            double perturbation_scale) {
    if (period < 1) throw PreconditionError("make_cycle: the period must be positive");
    if (grade < 1) throw PreconditionError("grades are 1-based");
    if (!(delta > 0.0)) throw PreconditionError("make_cycle: delta must be positive");
    if (perturbation_scale < 0.0 || perturbation_scale > 1.0) {
        throw PreconditionError("make_cycle: the perturbation scale lies in [0, 1]");
    }
    Rng rng(seed);
    Pseudotrajectory pt;
    pt.grade = grade;
    pt.delta = delta;
    pt.periodic = true;
    pt.origin = 0;
    pt.points.push_back(x0);
    for (std::int64_t j = 0; j + 1 < period; ++j) {
        const SeqVec tx = op_apply(op, pt.points.back());
        SeqVec next = tx;
        if (perturbation_scale > 0.0) {
            const double target = rng.uniform(0.2, 0.9) * delta * perturbation_scale;
            const SeqVec r = random_perturbation(rng, fam, grade, target, tx, pt.points.back());
            next = vec_axpy(1.0, r, tx);
        }
        pt.points.push_back(next);
    }
    derive_defects(pt, op);
    // Close by homogeneity: scaling every point scales every defect with it,
    // so the worst defect can be pinned at 0.9 * delta.
    const double worst = max_defect_norm(pt, fam);
    if (worst > 0.0) {
        const double f = 0.9 * delta / worst;
        for (SeqVec& x : pt.points) x = vec_scale(f, x);
        derive_defects(pt, op);
        // Rounding in the rescaled products can nudge the worst defect a hair
        // past 0.9 * delta, still far inside the budget.
    }
    return pt;
}

Pseudotrajectory make_two_sided(const LinearOp& op, const SeminormFamily& fam, const SeqVec& x0,
                                std::int64_t m, int grade, double delta, std::uint64_t seed,
                                double perturbation_scale) {
    if (m < 1) throw PreconditionError("make_two_sided: the half-length must be positive");
    if (grade < 1) throw PreconditionError("grades are 1-based");
    if (!(delta > 0.0)) throw PreconditionError("make_two_sided: delta must be positive");
    if (perturbation_scale < 0.0 || perturbation_scale > 1.0) {
        throw PreconditionError("make_two_sided: the perturbation scale lies in [0, 1]");
    }
    Rng rng(seed);
    const LinearOp inv = op_inverse(op);
    std::vector<SeqVec> forward;
    forward.push_back(x0);
    for (std::int64_t j = 0; j < m; ++j) {
        const SeqVec tx = op_apply(op, forward.back());
        SeqVec next = tx;
        if (perturbation_scale > 0.0) {
            const double target = rng.uniform(0.2, 0.9) * delta * perturbation_scale;
            const SeqVec r = random_perturbation(rng, fam, grade, target, tx, forward.back());
            next = vec_axpy(1.0, r, tx);
        }
        forward.push_back(next);
    }
    std::vector<SeqVec> backward; // x_{-1}, x_{-2}, ...
    SeqVec cur = x0;
    for (std::int64_t j = 0; j < m; ++j) {
        SeqVec target_of_step = cur; // x_{-j-1} solves T x_{-j-1} = x_{-j} - defect
        if (perturbation_scale > 0.0) {
            const double target = rng.uniform(0.2, 0.9) * delta * perturbation_scale;
            const SeqVec r = random_perturbation(rng, fam, grade, target, cur, cur);
            target_of_step = vec_sub(cur, r);
        }
        cur = op_apply(inv, target_of_step);
        backward.push_back(cur);
    }
    Pseudotrajectory pt;
    pt.grade = grade;
    pt.delta = delta;
    pt.periodic = false;
    pt.origin = m;
    for (auto it = backward.rbegin(); it != backward.rend(); ++it) pt.points.push_back(*it);
    for (SeqVec& x : forward) pt.points.push_back(std::move(x));
    derive_defects(pt, op);
    return pt;
}

ShadowReport shadow_finite(const Pseudotrajectory& chain, const GHCertificate& cert,
                           const LinearOp& op, const SeminormFamily& fam) {
    if (chain.periodic) throw PreconditionError("shadow_finite expects an open chain");
    if (chain.origin != 0) throw PreconditionError("shadow_finite expects the origin at index zero");
    if (chain.points.size() < 2) throw PreconditionError("shadow_finite needs at least one step");
    const GradeConstants& gc = certificate_constants(cert, chain.grade);
    const std::size_t p = chain.defects.size();

    // x = x_0 + sum_{j=1..p} T^{-j} P_N y_{j-1}, accumulated as a nested sum
    // so each term costs one inverse application.
    const LinearOp inv = op_inverse(op);
    SeqVec acc = zero_vec();
    for (std::size_t j = p; j >= 1; --j) {
        acc = op_apply(inv, vec_axpy(1.0, project_n(cert, chain.defects[j - 1]), acc));
    }
    ShadowReport rep;
    rep.shadow_point = vec_axpy(1.0, acc, chain.points[0]);
    rep.deviations = series_deviations(chain, cert, op, fam, 0);
    rep.max_deviation = *std::max_element(rep.deviations.begin(), rep.deviations.end());
    rep.bound_used = 2.0 * gc.c * cert.d * chain.delta / (1.0 - gc.t);
    rep.series_terms = static_cast<std::int64_t>(p);
    return rep;
}

ShadowReport shadow_periodic(const Pseudotrajectory& cycle, const GHCertificate& cert,
                             const LinearOp& op, const SeminormFamily& fam, double tol) {
    if (!cycle.periodic) throw PreconditionError("shadow_periodic expects a cycle");
    const auto p = static_cast<std::int64_t>(cycle.points.size());
    if (p < 1 || cycle.defects.size() != static_cast<std::size_t>(p)) {
        throw PreconditionError("shadow_periodic: malformed cycle");
    }
    const GradeConstants& gc = certificate_constants(cert, cycle.grade);
    const double t = gc.t;
    const double ymax = max_defect_norm(cycle, fam);

    const double head =
        gc.c * cert.d * ymax * static_cast<double>(p) / (1.0 - ipow(t, static_cast<int>(p)));
    std::int64_t K = std::max(geometric_cutoff(head, t, tol), p);

    const LinearOp inv = op_inverse(op);
    // sum_{j=1..K} T^{-j} P_N y_{(j-1) mod p}
    SeqVec accn = zero_vec();
    for (std::int64_t j = K; j >= 1; --j) {
        const SeqVec& y = cycle.defects[static_cast<std::size_t>((j - 1) % p)];
        accn = op_apply(inv, vec_axpy(1.0, project_n(cert, y), accn));
    }
    // sum_{e=0..K} T^{e} P_M y_{p-1-(e mod p)}
    SeqVec accm = zero_vec();
    for (std::int64_t e = K; e >= 0; --e) {
        const SeqVec& y = cycle.defects[static_cast<std::size_t>(p - 1 - (e % p))];
        accm = vec_axpy(1.0, project_m(cert, y), op_apply(op, accm));
    }

    ShadowReport rep;
    rep.shadow_point = vec_sub(vec_axpy(1.0, accn, cycle.points[0]), accm);
    rep.deviations = series_deviations(cycle, cert, op, fam, K);
    rep.max_deviation = *std::max_element(rep.deviations.begin(), rep.deviations.end());
    rep.bound_used = 3.0 * gc.c * cert.d * cycle.delta / (1.0 - t);
    rep.periodic_residual = seminorm_eval(
        fam, cycle.grade, vec_sub(op_iterate(op, rep.shadow_point, p), rep.shadow_point));
    // Dropped tail terms: T^p turns T^{-j} (j > K >= p) into T^{-(j-p)} and
    // T^{e} into T^{e+p}, so every piece is still covered by the certificate.
    const double tail = gc.c * cert.d * ymax / (1.0 - t);
    rep.residual_bound = tail * (2.0 * std::pow(t, static_cast<double>(K + 1)) +
                                 std::pow(t, static_cast<double>(K + 1 - p)) +
                                 std::pow(t, static_cast<double>(K + 1 + p)));
    rep.truncation_tolerance = tol;
    rep.series_terms = K;
    return rep;
}

ShadowReport shadow_two_sided(const Pseudotrajectory& pseudo, const GHCertificate& cert,
                              const LinearOp& op, const SeminormFamily& fam, double tol) {
    if (pseudo.periodic) throw PreconditionError("shadow_two_sided expects an open segment");
    const auto count = static_cast<std::int64_t>(pseudo.points.size());
    if (count < 2) throw PreconditionError("shadow_two_sided needs at least one step");
    const std::int64_t o = pseudo.origin;
    const std::int64_t fwd_steps = count - 1 - o;
    const std::int64_t bwd_steps = o;
    const GradeConstants& gc = certificate_constants(cert, pseudo.grade);
    const double b = op_norm_bound(op_inverse(op), fam, pseudo.grade);
    if (!std::isfinite(b)) {
        throw PreconditionError(
            "shadow_two_sided: the inverse has no bound at the working grade, so no two-sided "
            "budget exists");
    }
    const double ymax = max_defect_norm(pseudo, fam);
    const double head = gc.c * cert.d * std::max(1.0, b) * ymax / (1.0 - gc.t);
    const std::int64_t cutoff = geometric_cutoff(head, gc.t, tol);
    const std::int64_t kn = std::min(cutoff, fwd_steps);
    const std::int64_t km = std::min(cutoff, bwd_steps);

    const LinearOp inv = op_inverse(op);
    // u = sum_{j=1..kn} T^{-j} P_N y_{j-1}   (y indexed by time)
    SeqVec u = zero_vec();
    for (std::int64_t j = kn; j >= 1; --j) {
        const SeqVec& y = pseudo.defects[static_cast<std::size_t>(o + j - 1)];
        u = op_apply(inv, vec_axpy(1.0, project_n(cert, y), u));
    }
    // v = - sum_{j=0..km-1} T^{j} P_M y_{o-1-j}: the accumulated past-defect
    // correction, advanced by the same recursion M_{r+1} = T M_r + P_M y_r
    // that defines the deviation series, so the reported point really is the
    // time-zero point of the orbit the deviations are measured against.
    SeqVec v = zero_vec();
    for (std::int64_t i = o - km; i <= o - 1; ++i) {
        v = vec_axpy(1.0, project_m(cert, pseudo.defects[static_cast<std::size_t>(i)]),
                     op_apply(op, v));
    }
    v = vec_scale(-1.0, v);

    ShadowReport rep;
    rep.shadow_point = vec_axpy(1.0, v, vec_axpy(1.0, u, pseudo.points[static_cast<std::size_t>(o)]));
    rep.deviations = series_deviations(pseudo, cert, op, fam, 0);
    rep.max_deviation = *std::max_element(rep.deviations.begin(), rep.deviations.end());
    rep.bound_used = 3.0 * b * gc.c * cert.d * pseudo.delta / (1.0 - gc.t);
    rep.truncation_tolerance = tol;
    rep.series_terms = std::max(kn, km);
    return rep;
}

VerifyResult verify_shadowing(const Pseudotrajectory& pt, const SeqVec& candidate,
                              const LinearOp& op, const SeminormFamily& fam, int grade) {
    if (grade < 1) throw PreconditionError("grades are 1-based");
    if (pt.points.empty()) throw PreconditionError("verify_shadowing: empty pseudotrajectory");
    VerifyResult res;
    res.deviations = deviation_sweep(pt, candidate, op, fam, grade);
    res.max_deviation = *std::max_element(res.deviations.begin(), res.deviations.end());
    const std::size_t p = pt.points.size();
    const std::size_t steps = pt.periodic ? p : p - 1;
    double mismatch = 0.0;
    for (std::size_t r = 0; r < steps && r < pt.defects.size(); ++r) {
        const SeqVec rederived = vec_sub(pt.points[(r + 1) % p], op_apply(op, pt.points[r]));
        const SeqVec diff = vec_sub(pt.defects[r], rederived);
        for (const auto& [j, val] : diff.coeffs()) {
            (void)j;
            mismatch = std::max(mismatch, std::fabs(val));
        }
    }
    res.max_defect_mismatch = mismatch;
    res.defects_consistent = pt.defects.size() == steps && mismatch == 0.0;
    return res;
}

CounterexampleReport counterexample_cycle(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw PreconditionError("counterexample_cycle: delta must be positive and finite");
    }
    CounterexampleReport rep;
    rep.op = make_backward_shift(
        WeightSequence({{0, 0.5}}, TailRule::constant(0.5), TailRule::constant(2.0)));
    rep.fam = SeminormFamily::c0();

    std::int64_t n = 0;
    while (ipow(2.0, static_cast<int>(n)) * delta <= 1.0) {
        ++n;
        if (n > 4000) throw PreconditionError("counterexample_cycle: delta is too small to ramp past 1");
    }
    rep.n = n;
    rep.peak = ipow(2.0, static_cast<int>(n)) * delta;
    rep.separation = rep.peak;

    const IndexWindow w(-n - 1, n + 1);
    Pseudotrajectory& cy = rep.cycle;
    cy.grade = 1;
    cy.delta = delta;
    cy.periodic = true;
    cy.origin = 0;
    cy.points.push_back(SeqVec(w)); // the zero point
    for (std::int64_t i = 1; i <= 2 * n + 1; ++i) {
        const std::int64_t site = n - (i - 1);
        SeqVec x(w);
        x.set(site, ipow(2.0, static_cast<int>(n - (site < 0 ? -site : site))) * delta);
        cy.points.push_back(std::move(x));
    }
    derive_defects(cy, LinearOp{rep.op});

    std::ostringstream os;
    os << "every application moves the highest occupied site down by one, so a finitely "
          "supported point fixed by any iterate must be zero; the only orbit available to "
          "shadow this cycle is the zero orbit, and the cycle climbs to sup-distance "
       << rep.peak << " from it while every defect stays within " << delta;
    rep.argument = os.str();
    return rep;
}

AdversarialChain adversarial_mult_chain(const MultiplicationOperator& op, double delta,
                                        std::int64_t steps) {
    validate_multiplication(op);
    if (!op.marked_site.has_value()) {
        throw PreconditionError("adversarial_mult_chain: the operator needs a marked unit-modulus site");
    }
    if (!(delta > 0.0)) throw PreconditionError("adversarial_mult_chain: delta must be positive");
    if (steps < 1) throw PreconditionError("adversarial_mult_chain: steps must be positive");
    const std::size_t z0 = *op.marked_site;
    const std::size_t width = op.sites.size();

    AdversarialChain chain;
    chain.delta = delta;
    chain.functions.push_back(std::vector<double>(width, 0.0));
    double phase_pow = 1.0; // marked phase to the power j-1
    for (std::int64_t j = 1; j <= steps; ++j) {
        const std::vector<double>& prev = chain.functions.back();
        std::vector<double> next(width, 0.0);
        for (std::size_t s = 0; s < width; ++s) {
            next[s] = op.signed_value(s) * prev[s] + phase_pow * delta;
        }
        chain.defect_sups.push_back(delta);
        if (chain.escape_index < 0 && std::fabs(next[z0]) >= 2.0) {
            chain.escape_index = j;
        }
        chain.functions.push_back(std::move(next));
        phase_pow *= op.marked_phase;
    }
    std::ostringstream os;
    os << "each step adds a constant defect of sup-norm " << delta
       << ", yet the value at the marked site grows by delta in modulus every step; ";
    if (chain.escape_index >= 0) {
        os << "it leaves the radius-2 ball at step " << chain.escape_index;
    } else {
        os << "within " << steps << " steps it has not yet left the radius-2 ball";
    }
    chain.note = os.str();
    return chain;
}

} // namespace shadowlab
