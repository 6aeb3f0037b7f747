#include "shadowlab/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

constexpr int kMaxFixedPointIters = 10000;
constexpr std::int64_t kSeriesCutoffCap = 2'000'000;
constexpr std::int64_t kRadialKCap = 1'000'000;
constexpr std::int64_t kHubSiteCap = 1'000'000;

/// Piecewise-linear response: interpolates the nodes, constant beyond them.
double pl_eval(const SiteResponse& f, double v) {
    const auto& in = f.inputs;
    const auto& out = f.outputs;
    if (v <= in.front()) return out.front();
    if (v >= in.back()) return out.back();
    const auto it = std::upper_bound(in.begin(), in.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - in.begin()); // in[i-1] <= v < in[i]
    const double w = (v - in[i - 1]) / (in[i] - in[i - 1]);
    return out[i - 1] + w * (out[i] - out[i - 1]);
}

IndexWindow response_window(const TablePerturbation& g) {
    return IndexWindow(g.response.begin()->first, g.response.rbegin()->first);
}

} // namespace

void validate_perturbation(const Perturbation& g) {
    if (std::holds_alternative<ConstantPerturbation>(g)) return; // SeqVec enforces finiteness
    const auto& table = std::get<TablePerturbation>(g);
    for (const auto& [site, f] : table.response) {
        const std::string where = " (site " + std::to_string(site) + ")";
        if (f.inputs.empty() || f.inputs.size() != f.outputs.size())
            throw ConfigError("site response needs matching non-empty input/output lists" + where);
        for (std::size_t i = 0; i < f.inputs.size(); ++i)
            if (!std::isfinite(f.inputs[i]) || !std::isfinite(f.outputs[i]))
                throw ConfigError("site response entries must be finite" + where);
        for (std::size_t i = 1; i < f.inputs.size(); ++i)
            if (!(f.inputs[i - 1] < f.inputs[i]))
                throw ConfigError("site response inputs must be strictly increasing" + where);
    }
}

SeqVec perturbation_eval(const Perturbation& g, const SeqVec& x) {
    if (const auto* c = std::get_if<ConstantPerturbation>(&g)) return c->value;
    const auto& table = std::get<TablePerturbation>(g);
    if (table.response.empty()) return SeqVec{};
    SeqVec out(response_window(table));
    for (const auto& [site, f] : table.response) out.set(site, pl_eval(f, x.at(site)));
    return out;
}

double perturbation_bound(const Perturbation& g, const SeminormFamily& fam, int grade) {
    if (const auto* c = std::get_if<ConstantPerturbation>(&g))
        return seminorm_eval(fam, grade, c->value);
    const auto& table = std::get<TablePerturbation>(g);
    if (table.response.empty()) return 0.0;
    SeqVec worst(response_window(table));
    for (const auto& [site, f] : table.response) {
        double m = 0.0;
        for (const double v : f.outputs) m = std::max(m, std::abs(v));
        worst.set(site, m);
    }
    return seminorm_eval(fam, grade, worst);
}

double perturbation_lipschitz(const Perturbation& g) {
    if (std::holds_alternative<ConstantPerturbation>(g)) return 0.0;
    const auto& table = std::get<TablePerturbation>(g);
    double lip = 0.0;
    for (const auto& [site, f] : table.response)
        for (std::size_t i = 1; i < f.inputs.size(); ++i)
            lip = std::max(lip, std::abs(f.outputs[i] - f.outputs[i - 1]) /
                                    (f.inputs[i] - f.inputs[i - 1]));
    return lip;
}

Perturbation perturbation_negate(const Perturbation& g) {
    if (const auto* c = std::get_if<ConstantPerturbation>(&g))
        return ConstantPerturbation{vec_scale(-1.0, c->value)};
    TablePerturbation out = std::get<TablePerturbation>(g);
    for (auto& [site, f] : out.response)
        for (double& v : f.outputs) v = -v;
    return out;
}

SeqVec perturbed_apply(const PerturbedMap& S, const SeqVec& x) {
    return vec_axpy(1.0, perturbation_eval(S.g, x), op_apply(S.base, x));
}

SeqVec invert_perturbed(const PerturbedMap& S, const SeqVec& y, const SeminormFamily& fam,
                        int grade, double tol) {
    validate_perturbation(S.g);
    if (!(tol > 0.0)) throw PreconditionError("inversion tolerance must be positive");
    const double lip = perturbation_lipschitz(S.g);
    const LinearOp inv = op_inverse(S.base);
    if (lip > 0.0) {
        const double back = op_norm_bound(inv, fam, grade);
        if (!(lip * back < 1.0))
            throw PreconditionError(
                "fixed-point inversion needs Lipschitz(g) * ||base^{-1}|| < 1; got " +
                std::to_string(lip) + " * " + std::to_string(back));
    }
    SeqVec x = op_apply(inv, y);
    for (int iter = 0; iter < kMaxFixedPointIters; ++iter) {
        SeqVec next = op_apply(inv, vec_sub(y, perturbation_eval(S.g, x)));
        const double step = seminorm_eval(fam, grade, vec_sub(next, x));
        x = std::move(next);
        if (step < tol) return x;
    }
    throw PreconditionError("fixed-point inversion hit the iteration cap before reaching tolerance");
}

SeriesResult psi_inverse(const Perturbation& phi, const PerturbedMap& R,
                         const GHCertificate& cert, const SeqVec& x,
                         const SeminormFamily& fam, int grade, double tol) {
    validate_perturbation(phi);
    validate_perturbation(R.g);
    if (!(tol > 0.0)) throw PreconditionError("series tolerance must be positive");
    const GradeConstants& gc = certificate_constants(cert, grade);
    const double bound = perturbation_bound(phi, fam, grade);
    if (!std::isfinite(bound))
        throw PreconditionError("the perturbing map is unbounded under the working seminorm");
    const double head = gc.c * cert.d * bound / (1.0 - gc.t);
    const std::int64_t K = std::max<std::int64_t>(geometric_cutoff(head, gc.t, tol), 1);
    if (K > kSeriesCutoffCap)
        throw PreconditionError("contraction rate too close to 1 for a practical series cutoff");

    // phi along the backward orbit R^{-k-1} x (index k = 0..K) and the
    // forward orbit R^{k-1} x (index k-1, k = 1..K).  A constant map never
    // consults its argument, so the orbit computation is skipped for it.
    std::vector<SeqVec> phi_back(static_cast<std::size_t>(K + 1));
    std::vector<SeqVec> phi_fwd(static_cast<std::size_t>(K));
    if (const auto* c = std::get_if<ConstantPerturbation>(&phi)) {
        std::fill(phi_back.begin(), phi_back.end(), c->value);
        std::fill(phi_fwd.begin(), phi_fwd.end(), c->value);
    } else {
        const double inner_tol = tol * 1e-3;
        SeqVec cur = x;
        for (std::int64_t k = 0; k <= K; ++k) {
            cur = invert_perturbed(R, cur, fam, grade, inner_tol);
            phi_back[static_cast<std::size_t>(k)] = perturbation_eval(phi, cur);
        }
        cur = x;
        phi_fwd[0] = perturbation_eval(phi, cur);
        for (std::int64_t k = 2; k <= K; ++k) {
            cur = perturbed_apply(R, cur);
            phi_fwd[static_cast<std::size_t>(k - 1)] = perturbation_eval(phi, cur);
        }
    }

    // sum_{k=0}^{K} base^k P_M(...): acc = a_K, then acc = a_k + base(acc).
    SeqVec msum = project_m(cert, phi_back[static_cast<std::size_t>(K)]);
    for (std::int64_t k = K - 1; k >= 0; --k)
        msum = vec_axpy(1.0, project_m(cert, phi_back[static_cast<std::size_t>(k)]),
                        op_apply(R.base, msum));

    // sum_{k=1}^{K} base^{-k} P_N(...): acc = base^{-1}(b_k + acc), k = K..1.
    const LinearOp inv = op_inverse(R.base);
    SeqVec nsum;
    for (std::int64_t k = K; k >= 1; --k)
        nsum = op_apply(
            inv, vec_axpy(1.0, project_n(cert, phi_fwd[static_cast<std::size_t>(k - 1)]), nsum));

    SeriesResult out;
    out.value = vec_sub(msum, nsum);
    out.cutoff = K;
    out.truncation_bound = 2.0 * head * ipow(gc.t, static_cast<int>(K + 1));
    return out;
}

double conjugacy_delta(const GHCertificate& cert, double eps, int alpha) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw PreconditionError("target displacement must be positive and finite");
    const GradeConstants& gc = certificate_constants(cert, alpha);
    return (1.0 - gc.t) * eps / (2.0 * gc.c * cert.d);
}

ConjugacyPoint conjugacy_map(const PerturbedMap& S, const GHCertificate& cert, const SeqVec& x,
                             const SeminormFamily& fam, int grade, double tol) {
    const SeriesResult series = psi_inverse(perturbation_negate(S.g), S, cert, x, fam, grade, tol);
    const GradeConstants& gc = certificate_constants(cert, grade);
    const double bound = perturbation_bound(S.g, fam, grade);
    ConjugacyPoint out;
    out.phi_x = vec_axpy(1.0, series.value, x);
    out.displacement = seminorm_eval(fam, grade, series.value);
    out.cutoff = series.cutoff;
    out.truncation_bound = series.truncation_bound;
    out.residual_bound =
        gc.c * cert.d * bound * ipow(gc.t, static_cast<int>(series.cutoff)) * (1.0 + gc.t);
    return out;
}

SemiconjugacyReport verify_semiconjugacy(const LinearOp& base, const PerturbedMap& S,
                                         const std::function<SeqVec(const SeqVec&)>& phi,
                                         const std::vector<SeqVec>& samples,
                                         const SeminormFamily& fam, int grade) {
    SemiconjugacyReport rep;
    rep.residuals.reserve(samples.size());
    for (const SeqVec& x : samples) {
        const SeqVec lhs = op_apply(base, phi(x));
        const SeqVec rhs = phi(perturbed_apply(S, x));
        const double r = seminorm_eval(fam, grade, vec_sub(lhs, rhs));
        rep.residuals.push_back(r);
        rep.max_residual = std::max(rep.max_residual, r);
    }
    return rep;
}

namespace {

/// Profile through (1,1), (u_mid, phi_mid), (1+k, 1+k); identity elsewhere.
double profile_eval(const RadialStage& st, double u) {
    const double top = 1.0 + static_cast<double>(st.k);
    if (u <= 1.0 || u >= top) return u;
    if (u <= st.u_mid) return 1.0 + (st.phi_mid - 1.0) * (u - 1.0) / (st.u_mid - 1.0);
    return st.phi_mid + (top - st.phi_mid) * (u - st.u_mid) / (top - st.u_mid);
}

SeqVec stage_forward(const RadialStage& st, const SeqVec& x, const SeminormFamily& fam,
                     int grade) {
    const SeqVec rel = vec_sub(x, st.center);
    const double s = seminorm_eval(fam, grade, rel) / st.radius;
    if (!(s > 0.0) || s >= 1.0) return x; // null fiber and outside: exact identity
    const double u = 1.0 + static_cast<double>(st.k) * s;
    return vec_axpy(profile_eval(st, u) / u, rel, st.center);
}

SeqVec stage_backward(const RadialStage& st, const SeqVec& y, const SeminormFamily& fam,
                      int grade) {
    const SeqVec rel = vec_sub(y, st.center);
    const double sigma = seminorm_eval(fam, grade, rel) / st.radius;
    if (!(sigma > 0.0) || sigma >= 1.0) return y;
    // Relative distance s |-> profile(1+ks) s / (1+ks) is strictly increasing
    // (product of increasing positive factors) and maps [0,1] onto [0,1];
    // bisect it against sigma.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double u = 1.0 + static_cast<double>(st.k) * mid;
        if (profile_eval(st, u) * mid / u < sigma) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return vec_axpy(0.5 * (lo + hi) / sigma, rel, st.center);
}

/// Stage moving the point at relative seminorm distance `anorm` radially by
/// the factor `lam`, using the smallest admissible profile break k.
RadialStage make_stage(SeqVec center, double radius, double lam, double anorm, bool inverted) {
    RadialStage st;
    st.center = std::move(center);
    st.radius = radius;
    st.inverted = inverted;
    for (std::int64_t k = 1; k <= kRadialKCap; ++k) {
        const double mid = lam * (1.0 + static_cast<double>(k) * anorm);
        if (mid > 1.0 && mid < 1.0 + static_cast<double>(k)) {
            st.k = k;
            st.u_mid = 1.0 + static_cast<double>(k) * anorm;
            st.phi_mid = mid;
            return st;
        }
    }
    throw PreconditionError(
        "no admissible profile break: the radial ratio is out of range for every k");
}

/// Stage pulling the point q = hub + rel (at distance dist > 0) into the hub,
/// acting inside the ball of radius rr around the hub: its own center sits a
/// third of the remaining room behind the hub, so hub and q are colinear from
/// there and the stage ball nests inside the hub ball.
RadialStage step2_stage(const SeqVec& hub, double rr, const SeqVec& rel, double dist,
                        bool inverted) {
    const double t = (rr - dist) / 3.0;
    SeqVec xi = vec_axpy(-t / dist, rel, hub);
    const double lam = t / (dist + t);
    const double anorm = (dist + t) / (rr - t);
    return make_stage(std::move(xi), rr - t, lam, anorm, inverted);
}

/// lam > 0 with v = lam * u coefficientwise (relative slack 1e-12), if any.
std::optional<double> coefficient_ratio(const SeqVec& u, const SeqVec& v) {
    if (u.is_zero() || v.is_zero()) return std::nullopt;
    std::int64_t ref = 0;
    double best = -1.0;
    for (const auto& [j, c] : u.coeffs())
        if (std::abs(c) > best) {
            best = std::abs(c);
            ref = j;
        }
    const double lam = v.at(ref) / u.at(ref);
    if (!(lam > 0.0) || !std::isfinite(lam)) return std::nullopt;
    for (const auto& [j, c] : u.coeffs()) {
        const double want = lam * c;
        const double got = v.at(j);
        if (std::abs(got - want) > 1e-12 * std::max(std::abs(got), std::abs(want)))
            return std::nullopt;
    }
    for (const auto& [j, c] : v.coeffs()) {
        (void)c;
        if (u.at(j) == 0.0) return std::nullopt;
    }
    return lam;
}

/// Smallest-|index| coordinate outside both supports that the seminorm sees.
std::int64_t free_site(const SeqVec& u, const SeqVec& v, const SeminormFamily& fam, int grade) {
    for (std::int64_t m = 0; m <= kHubSiteCap; ++m) {
        const std::int64_t cands[2] = {m, -m};
        const int n = (m == 0) ? 1 : 2;
        for (int i = 0; i < n; ++i) {
            const std::int64_t j = cands[i];
            if (u.at(j) != 0.0 || v.at(j) != 0.0) continue;
            const double entry = seminorm_eval(fam, grade, unit_vector(j, IndexWindow(j, j)));
            if (entry > 0.0 && std::isfinite(entry)) return j;
        }
    }
    throw PreconditionError(
        "no coordinate outside the endpoint supports is visible to the seminorm");
}

} // namespace

BallHomeo radial_homeo(const SeqVec& x0, double r, const SeminormFamily& fam, int grade,
                       const SeqVec& a, const SeqVec& b) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw PreconditionError("ball radius must be positive and finite");
    const SeqVec rel_a = vec_sub(a, x0);
    const SeqVec rel_b = vec_sub(b, x0);
    const double da = seminorm_eval(fam, grade, rel_a);
    const double db = seminorm_eval(fam, grade, rel_b);
    if (!(da < r) || !(db < r))
        throw PreconditionError("both endpoints must lie strictly inside the ball");

    BallHomeo h;
    h.fam = fam;
    h.grade = grade;
    h.center = x0;
    h.radius = r;
    if (vec_sub(a, b).is_zero()) return h;

    if (da > 0.0) {
        if (const auto lam = coefficient_ratio(rel_a, rel_b)) {
            h.stages.push_back(make_stage(x0, r, *lam, da / r, false));
            return h;
        }
    }

    // Route both endpoints through a hub.  When either endpoint sits on the
    // seminorm's null fiber through x0, displace the hub along a coordinate
    // outside both supports so that both distances become positive; the hub
    // ball shrinks by the full room so it still nests inside the original.
    SeqVec hub = x0;
    double rr = r;
    if (da == 0.0 || db == 0.0) {
        const double room = (r - std::max(da, db)) / 4.0;
        const std::int64_t site = free_site(rel_a, rel_b, fam, grade);
        const SeqVec e = unit_vector(site, IndexWindow(site, site));
        const double entry = seminorm_eval(fam, grade, e);
        hub = vec_axpy(room / (2.0 * entry), e, x0);
        rr = r - room;
    }
    const SeqVec ha = vec_sub(a, hub);
    const SeqVec hb = vec_sub(b, hub);
    const double dist_a = seminorm_eval(fam, grade, ha);
    const double dist_b = seminorm_eval(fam, grade, hb);
    if (!(dist_a > 0.0) || !(dist_b > 0.0))
        throw PreconditionError("could not separate the endpoints from the hub center");
    h.stages.push_back(step2_stage(hub, rr, ha, dist_a, false));
    h.stages.push_back(step2_stage(hub, rr, hb, dist_b, true));
    return h;
}

BallHomeo radial_homeo_chain(const SeqVec& x0, double r, const SeminormFamily& fam, int grade,
                             const std::vector<SeqVec>& waypoints) {
    if (waypoints.empty()) throw PreconditionError("waypoint list must not be empty");
    for (const SeqVec& w : waypoints)
        if (!(seminorm_eval(fam, grade, vec_sub(w, x0)) < r))
            throw PreconditionError("waypoints must lie strictly inside the ball");
    BallHomeo h;
    h.fam = fam;
    h.grade = grade;
    h.center = x0;
    h.radius = r;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        BallHomeo leg = radial_homeo(x0, r, fam, grade, waypoints[i], waypoints[i + 1]);
        for (auto& st : leg.stages) h.stages.push_back(std::move(st));
    }
    return h;
}

SeqVec radial_homeo_apply(const BallHomeo& h, const SeqVec& x) {
    SeqVec cur = x;
    for (const auto& st : h.stages)
        cur = st.inverted ? stage_backward(st, cur, h.fam, h.grade)
                          : stage_forward(st, cur, h.fam, h.grade);
    return cur;
}

SeqVec radial_homeo_inverse_apply(const BallHomeo& h, const SeqVec& y) {
    SeqVec cur = y;
    for (auto it = h.stages.rbegin(); it != h.stages.rend(); ++it)
        cur = it->inverted ? stage_forward(*it, cur, h.fam, h.grade)
                           : stage_backward(*it, cur, h.fam, h.grade);
    return cur;
}

} // namespace shadowlab
