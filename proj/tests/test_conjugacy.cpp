#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "shadowlab/conjugacy.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/hyperbolicity.hpp"
#include "shadowlab/rng.hpp"

using namespace shadowlab;

namespace {

// Forward shift contracting the upper half line (w_j = a for j >= 0) and
// expanding the lower one (w_j = 1/a for j < 0).
ShiftOperator split_shift(double a) {
    return make_forward_shift(
        WeightSequence({}, TailRule::constant(1.0 / a), TailRule::constant(a)));
}

SeqVec single(std::int64_t site, double value, std::int64_t halfwidth = 8) {
    SeqVec v(IndexWindow(-halfwidth, halfwidth));
    v.set(site, value);
    return v;
}

SeqVec random_vec(Rng& rng, const IndexWindow& w, int sites, double amp) {
    SeqVec x(w);
    for (int s = 0; s < sites; ++s) {
        x.set(w.lo + rng.index(w.width()), rng.uniform(-amp, amp));
    }
    return x;
}

double dist(const SeminormFamily& fam, int grade, const SeqVec& u, const SeqVec& v) {
    return seminorm_eval(fam, grade, vec_sub(u, v));
}

} // namespace

TEST_CASE("perturbation validation rejects malformed tables") {
    CHECK_NOTHROW(validate_perturbation(ConstantPerturbation{single(0, 1.0)}));
    CHECK_NOTHROW(validate_perturbation(ConstantPerturbation{SeqVec{}}));

    TablePerturbation ok;
    ok.response[0] = SiteResponse{{-1.0, 0.0, 1.0}, {-0.3, 0.0, 0.3}};
    ok.response[3] = SiteResponse{{0.0}, {0.5}};
    CHECK_NOTHROW(validate_perturbation(Perturbation{ok}));

    TablePerturbation empty_nodes;
    empty_nodes.response[0] = SiteResponse{{}, {}};
    CHECK_THROWS_AS(validate_perturbation(Perturbation{empty_nodes}), ConfigError);

    TablePerturbation mismatched;
    mismatched.response[0] = SiteResponse{{0.0, 1.0}, {0.5}};
    CHECK_THROWS_AS(validate_perturbation(Perturbation{mismatched}), ConfigError);

    TablePerturbation decreasing;
    decreasing.response[0] = SiteResponse{{0.0, 0.0}, {0.1, 0.2}};
    CHECK_THROWS_AS(validate_perturbation(Perturbation{decreasing}), ConfigError);

    TablePerturbation infinite;
    infinite.response[0] =
        SiteResponse{{0.0, 1.0}, {0.1, std::numeric_limits<double>::infinity()}};
    CHECK_THROWS_AS(validate_perturbation(Perturbation{infinite}), ConfigError);
}

TEST_CASE("perturbation evaluation, bound, Lipschitz constant and negation") {
    const SeminormFamily l1 = SeminormFamily::lp(1.0);

    const Perturbation cst = ConstantPerturbation{single(0, 0.4)};
    CHECK(perturbation_eval(cst, single(2, 9.0)).at(0) == 0.4);
    CHECK(perturbation_bound(cst, l1, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(perturbation_lipschitz(cst) == 0.0);
    const Perturbation ncst = perturbation_negate(cst);
    CHECK(perturbation_eval(ncst, SeqVec{}).at(0) == -0.4);

    TablePerturbation tab;
    tab.response[0] = SiteResponse{{-1.0, 0.0, 1.0}, {-0.3, 0.0, 0.3}};
    tab.response[3] = SiteResponse{{0.0}, {0.5}};
    const Perturbation g{tab};

    // Interior of a segment interpolates linearly; outside clamps to the ends.
    const SeqVec mid = perturbation_eval(g, single(0, 0.5));
    CHECK(mid.at(0) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(mid.at(3) == 0.5); // single-node responses are constant
    CHECK(perturbation_eval(g, single(0, 7.0)).at(0) == 0.3);
    CHECK(perturbation_eval(g, single(0, -7.0)).at(0) == -0.3);
    // Sites the input never touches still read as zero.
    CHECK(perturbation_eval(g, SeqVec{}).at(0) == 0.0);

    // Worst outputs are attained sitewise and summed by the seminorm.
    CHECK(perturbation_bound(g, l1, 1) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(perturbation_lipschitz(g) == doctest::Approx(0.3).epsilon(1e-14));

    const Perturbation ng = perturbation_negate(g);
    CHECK(perturbation_eval(ng, single(0, 0.5)).at(0) ==
          doctest::Approx(-0.15).epsilon(1e-15));
    CHECK(perturbation_lipschitz(ng) == doctest::Approx(0.3).epsilon(1e-14));

    // An unbounded constant displacement is reported as infinity, not thrown.
    SeqVec far(IndexWindow(500000, 500000));
    far.set(500000, 1e300);
    CHECK(std::isinf(
        perturbation_bound(ConstantPerturbation{far}, SeminormFamily::rapid_decrease(), 6)));
}

TEST_CASE("perturbed maps apply pointwise and invert by fixed point") {
    const SeminormFamily fam = SeminormFamily::lp(2.0);

    // Zero Lipschitz constant: one corrective step is already exact.
    SeqVec c(IndexWindow(-4, 4));
    c.set(0, 0.4);
    c.set(3, -0.2);
    const PerturbedMap affine{ScalarOperator{2.0}, ConstantPerturbation{c}};
    SeqVec y(IndexWindow(-4, 4));
    y.set(0, 1.7);
    y.set(3, 1.0);
    const SeqVec x = invert_perturbed(affine, y, fam, 1, 1e-12);
    CHECK(x.at(0) == doctest::Approx(0.65).epsilon(1e-15));
    CHECK(x.at(3) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(dist(fam, 1, perturbed_apply(affine, x), y) <= 1e-14);

    // Genuine contraction: solve 2 x + 0.3 x = 1.7 on the active segment.
    TablePerturbation tab;
    tab.response[0] = SiteResponse{{-1.0, 0.0, 1.0}, {-0.3, 0.0, 0.3}};
    const PerturbedMap curved{ScalarOperator{2.0}, Perturbation{tab}};
    const SeqVec sol = invert_perturbed(curved, single(0, 1.7, 4), fam, 1, 1e-12);
    CHECK(sol.at(0) == doctest::Approx(1.7 / 2.3).epsilon(1e-9));
    CHECK(dist(fam, 1, perturbed_apply(curved, sol), single(0, 1.7, 4)) <= 5e-12);

    // The contraction condition Lipschitz(g) * ||base^{-1}|| < 1 is enforced.
    TablePerturbation steep;
    steep.response[0] = SiteResponse{{-1.0, 1.0}, {-1.5, 1.5}};
    const PerturbedMap bad{ScalarOperator{1.25}, Perturbation{steep}};
    CHECK_THROWS_AS(invert_perturbed(bad, single(0, 1.0, 4), fam, 1, 1e-10),
                    PreconditionError);
    CHECK_THROWS_AS(invert_perturbed(affine, y, fam, 1, 0.0), PreconditionError);
}

TEST_CASE("conjugation series matches the geometric closed form") {
    // Base 2 * identity: the splitting is all-expanding, so only the backward
    // branch contributes and a constant map phi = -c gives
    //   value = c (1 - 2^{-K}) coefficientwise.
    const SeminormFamily fam = SeminormFamily::lp(2.0);
    const SplitDetection det = certificate_for_scalar(ScalarOperator{2.0}, {1});
    REQUIRE(det.has_certificate());
    const GHCertificate& cert = *det.certificate;
    const PerturbedMap R{ScalarOperator{2.0}, ConstantPerturbation{SeqVec{}}};
    const Perturbation phi = ConstantPerturbation{single(0, -3.0)};

    const double tol = 1e-13;
    const SeriesResult out = psi_inverse(phi, R, cert, SeqVec{}, fam, 1, tol);
    const double head = 1.0 * 1.0 * 3.0 / (1.0 - 0.5);
    const std::int64_t K0 = std::max<std::int64_t>(geometric_cutoff(head, 0.5, tol), 1);
    CHECK(out.cutoff == K0);
    const double expect = 3.0 * (1.0 - std::pow(2.0, -static_cast<double>(K0)));
    CHECK(out.value.at(0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(out.truncation_bound ==
          doctest::Approx(2.0 * head * std::pow(0.5, static_cast<double>(K0 + 1)))
              .epsilon(1e-12));

    // All-contracting base: only the forward branch fires and the same map
    // accumulates to -c (2 - 2^{-K}).
    const SplitDetection half = certificate_for_scalar(ScalarOperator{0.5}, {1});
    REQUIRE(half.has_certificate());
    const PerturbedMap Rh{ScalarOperator{0.5}, ConstantPerturbation{SeqVec{}}};
    const SeriesResult contracted =
        psi_inverse(phi, Rh, *half.certificate, SeqVec{}, fam, 1, tol);
    CHECK(contracted.cutoff == K0);
    const double expect2 = -3.0 * (2.0 - std::pow(2.0, -static_cast<double>(K0)));
    CHECK(contracted.value.at(0) == doctest::Approx(expect2).epsilon(1e-12));

    // Halving the tolerance at least halves the truncation bound.
    double prev = out.truncation_bound;
    double t = tol;
    for (int i = 0; i < 4; ++i) {
        t *= 0.5;
        const SeriesResult finer = psi_inverse(phi, R, cert, SeqVec{}, fam, 1, t);
        CHECK(finer.cutoff >= out.cutoff);
        CHECK(finer.truncation_bound <= 0.5 * prev * (1.0 + 1e-12));
        prev = finer.truncation_bound;
    }

    // The zero map needs no series at all.
    const SeriesResult zero =
        psi_inverse(ConstantPerturbation{SeqVec{}}, R, cert, SeqVec{}, fam, 1, tol);
    CHECK(zero.value.is_zero());
    CHECK(zero.truncation_bound == 0.0);
}

TEST_CASE("conjugation series rejects hopeless inputs") {
    const SeminormFamily fam = SeminormFamily::lp(2.0);
    const SplitDetection det = certificate_for_scalar(ScalarOperator{2.0}, {1});
    REQUIRE(det.has_certificate());
    const PerturbedMap R{ScalarOperator{2.0}, ConstantPerturbation{SeqVec{}}};
    const Perturbation phi = ConstantPerturbation{single(0, 1.0)};

    CHECK_THROWS_AS(psi_inverse(phi, R, *det.certificate, SeqVec{}, fam, 1, 0.0),
                    PreconditionError);

    // A displacement the working seminorm cannot bound is refused.
    SeqVec far(IndexWindow(500000, 500000));
    far.set(500000, 1e300);
    CHECK_THROWS_AS(psi_inverse(ConstantPerturbation{far}, R, *det.certificate, SeqVec{},
                                SeminormFamily::rapid_decrease(), 6, 1e-6),
                    PreconditionError);

    // A contraction rate this close to one would need billions of terms.
    GHCertificate slow;
    slow.orientation = SplitOrientation::AllContractsForward;
    slow.trivial_splitting = true;
    slow.grade_constants[1] = GradeConstants{1, 1.0, 1.0 - 1e-9};
    const PerturbedMap Rs{ScalarOperator{0.5}, ConstantPerturbation{SeqVec{}}};
    CHECK_THROWS_AS(psi_inverse(phi, Rs, slow, SeqVec{}, fam, 1, 1e-6), PreconditionError);

    CHECK_THROWS_AS(conjugacy_delta(*det.certificate, 0.0, 1), PreconditionError);
    CHECK_THROWS_AS(
        conjugacy_delta(*det.certificate, std::numeric_limits<double>::infinity(), 1),
        PreconditionError);
}

TEST_CASE("conjugation series is linear in the perturbing map") {
    const ShiftOperator base = split_shift(0.25);
    const SeminormFamily fam = SeminormFamily::rapid_decrease();
    const SplitDetection det = detect_split(base, fam, {2});
    REQUIRE(det.has_certificate());
    const GHCertificate& cert = *det.certificate;
    const PerturbedMap R{base, ConstantPerturbation{SeqVec{}}};

    // Responses with pl(0) != 0 keep both series branches alive: the
    // backward orbit feeds the contracting sum through site 0 and the
    // forward orbit feeds the expanding sum through site -2.
    TablePerturbation t1;
    t1.response[0] = SiteResponse{{-1.0, 1.0}, {-0.25, 0.75}};
    t1.response[-2] = SiteResponse{{-1.0, 1.0}, {-0.25, 0.75}};
    TablePerturbation t2;
    t2.response[0] = SiteResponse{{-1.0, 1.0}, {0.25, 0.75}};
    t2.response[-2] = SiteResponse{{0.0}, {0.6}};
    const double alpha = 2.0;
    TablePerturbation tc; // alpha * t1 + t2, node by node
    tc.response[0] = SiteResponse{{-1.0, 1.0},
                                  {alpha * -0.25 + 0.25, alpha * 0.75 + 0.75}};
    tc.response[-2] = SiteResponse{{-1.0, 1.0},
                                   {alpha * -0.25 + 0.6, alpha * 0.75 + 0.6}};

    SeqVec x(IndexWindow(-8, 8));
    x.set(0, 0.3);
    x.set(-2, 0.2);

    const double tol = 1e-8;
    const SeriesResult s1 = psi_inverse(Perturbation{t1}, R, cert, x, fam, 2, tol);
    const SeriesResult s2 = psi_inverse(Perturbation{t2}, R, cert, x, fam, 2, tol);
    const SeriesResult sc = psi_inverse(Perturbation{tc}, R, cert, x, fam, 2, tol);

    // Each truncated value sits within its own truncation bound of the exact
    // (linear) series, so the linearity defect is bounded by the bound sum.
    const SeqVec defect =
        vec_sub(sc.value, vec_axpy(alpha, s1.value, s2.value));
    const double allowance = sc.truncation_bound +
                             alpha * s1.truncation_bound + s2.truncation_bound;
    CHECK(seminorm_eval(fam, 2, defect) <= allowance * (1.0 + 1e-9) + 1e-14);

    // The table maps genuinely consult the orbit: a different start point
    // produces a different series value.
    SeqVec x2(IndexWindow(-8, 8));
    x2.set(0, -0.4);
    const SeriesResult other = psi_inverse(Perturbation{t1}, R, cert, x2, fam, 2, tol);
    CHECK(dist(fam, 2, other.value, s1.value) > 1e-6);
}

TEST_CASE("conjugacy map stays within the displacement budget") {
    const ShiftOperator base = split_shift(0.25);
    const SeminormFamily fam = SeminormFamily::rapid_decrease();
    const SplitDetection det = detect_split(base, fam, {2});
    REQUIRE(det.has_certificate());
    const GHCertificate& cert = *det.certificate;
    const GradeConstants& gc = certificate_constants(cert, 2);

    // Budget for a displacement below eps = 0.1: (1 - t) eps / (2 c d).
    const double eps = 0.1;
    const double budget = conjugacy_delta(cert, eps, 2);
    CHECK(budget == doctest::Approx((1.0 - gc.t) * eps / (2.0 * gc.c * cert.d))
                        .epsilon(1e-12));
    CHECK(budget == doctest::Approx(1.0 / 90.0).epsilon(1e-12));

    const double bound = 0.005; // well inside the budget
    const PerturbedMap S{base, ConstantPerturbation{single(0, bound)}};
    const double tol = 1e-10;
    const double head = gc.c * cert.d * bound / (1.0 - gc.t);
    const std::int64_t K =
        std::max<std::int64_t>(geometric_cutoff(head, gc.t, tol), 1);
    const double rbound = gc.c * cert.d * bound *
                          std::pow(gc.t, static_cast<double>(K)) * (1.0 + gc.t);

    Rng rng(20260819);
    std::vector<SeqVec> samples;
    for (int i = 0; i < 20; ++i)
        samples.push_back(random_vec(rng, IndexWindow(-16, 16), 5, 2.0));

    for (const SeqVec& s : samples) {
        const ConjugacyPoint cp = conjugacy_map(S, cert, s, fam, 2, tol);
        CHECK(cp.cutoff == K);
        CHECK(cp.displacement < eps);
        CHECK(cp.displacement ==
              doctest::Approx(dist(fam, 2, cp.phi_x, s)).epsilon(1e-12));
        CHECK(cp.residual_bound == doctest::Approx(rbound).epsilon(1e-12));
        CHECK(cp.residual_bound < 1e-9);
    }

    // The constructed map intertwines base and the perturbed map within the
    // advertised residual bound at every sample.
    const auto phi = [&](const SeqVec& v) {
        return conjugacy_map(S, cert, v, fam, 2, tol).phi_x;
    };
    const SemiconjugacyReport rep = verify_semiconjugacy(base, S, phi, samples, fam, 2);
    REQUIRE(rep.residuals.size() == samples.size());
    CHECK(rep.max_residual <= rbound * (1.0 + 1e-6) + 1e-13);

    // The identity is not a conjugacy: its residual is the full perturbation.
    const auto ident = [](const SeqVec& v) { return v; };
    const SemiconjugacyReport wrong =
        verify_semiconjugacy(base, S, ident, samples, fam, 2);
    CHECK(wrong.max_residual == doctest::Approx(bound).epsilon(1e-12));
    CHECK(wrong.max_residual > 1e3 * rep.max_residual);

    // With no perturbation the conjugacy is the identity, exactly.
    const PerturbedMap id{base, ConstantPerturbation{SeqVec{}}};
    const ConjugacyPoint fix = conjugacy_map(id, cert, samples[0], fam, 2, tol);
    CHECK(vec_sub(fix.phi_x, samples[0]).is_zero());
    CHECK(fix.displacement == 0.0);
    CHECK(fix.residual_bound == 0.0);
}

TEST_CASE("radial transport along a common ray uses a single stage") {
    const SeminormFamily fam = SeminormFamily::lp(2.0);
    const SeqVec origin(IndexWindow(-8, 8));
    const SeqVec a = single(0, 0.2);
    const SeqVec b = single(0, 0.4);

    const BallHomeo h = radial_homeo(origin, 1.0, fam, 1, a, b);
    REQUIRE(h.stages.size() == 1);
    const RadialStage& st = h.stages[0];
    CHECK(st.k == 2);
    CHECK(st.u_mid == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(st.phi_mid == doctest::Approx(2.8).epsilon(1e-12));
    CHECK_FALSE(st.inverted);
    CHECK(st.center.is_zero());
    CHECK(st.radius == 1.0);

    CHECK(dist(fam, 1, radial_homeo_apply(h, a), b) <= 1e-12);
    // Beyond the break the profile interpolates toward the fixed boundary:
    // |b| = 0.4 maps through u = 1.8, phi(u) = 2.85, giving 0.4 * 2.85 / 1.8.
    CHECK(radial_homeo_apply(h, b).at(0) ==
          doctest::Approx(0.4 * 2.85 / 1.8).epsilon(1e-12));

    // Identity outside the ball and on its boundary, coefficient for
    // coefficient.
    const SeqVec far = single(2, 1.5);
    CHECK(vec_sub(radial_homeo_apply(h, far), far).is_zero());
    const SeqVec rim = single(0, 1.0);
    CHECK(vec_sub(radial_homeo_apply(h, rim), rim).is_zero());

    // Bijectivity: forward then backward restores every sample.
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        const SeqVec x = random_vec(rng, IndexWindow(-3, 3), 3, 0.8);
        const SeqVec there = radial_homeo_apply(h, x);
        CHECK(dist(fam, 1, radial_homeo_inverse_apply(h, there), x) <= 1e-9);
        CHECK(dist(fam, 1, radial_homeo_apply(h, radial_homeo_inverse_apply(h, x)), x) <=
              1e-9);
    }

    // Coordinates the seminorm cannot see are left alone by the single-stage
    // construction.
    const SeminormFamily prod = SeminormFamily::omega_product();
    const BallHomeo hp = radial_homeo(origin, 1.0, prod, 1, a, b);
    REQUIRE(hp.stages.size() == 1);
    const SeqVec ghost = single(3, 0.7);
    CHECK(vec_sub(radial_homeo_apply(hp, ghost), ghost).is_zero());

    // Equal endpoints need no stages at all.
    const BallHomeo none = radial_homeo(origin, 1.0, fam, 1, a, a);
    CHECK(none.stages.empty());
    const SeqVec probe = single(1, 0.3);
    CHECK(vec_sub(radial_homeo_apply(none, probe), probe).is_zero());
}

TEST_CASE("radial transport routes through a hub when rays disagree") {
    const SeminormFamily fam = SeminormFamily::lp(2.0);
    const SeqVec origin(IndexWindow(-8, 8));
    const SeqVec a = single(0, 0.2);

    // Opposite direction: no positive coefficientwise ratio exists.
    const SeqVec b = single(0, -0.4);
    const BallHomeo h = radial_homeo(origin, 1.0, fam, 1, a, b);
    REQUIRE(h.stages.size() == 2);
    CHECK_FALSE(h.stages[0].inverted);
    CHECK(h.stages[1].inverted);
    CHECK(dist(fam, 1, radial_homeo_apply(h, a), b) <= 1e-12);
    CHECK(dist(fam, 1, radial_homeo_inverse_apply(h, b), a) <= 1e-9);

    // Different support: same two-stage route.
    SeqVec c(IndexWindow(-8, 8));
    c.set(0, 0.1);
    c.set(1, 0.2);
    const BallHomeo h2 = radial_homeo(origin, 1.0, fam, 1, a, c);
    REQUIRE(h2.stages.size() == 2);
    CHECK(dist(fam, 1, radial_homeo_apply(h2, a), c) <= 1e-12);

    // Identity holds outside the ball even for composite routes.
    const SeqVec far = single(1, 1.25);
    CHECK(vec_sub(radial_homeo_apply(h, far), far).is_zero());
    CHECK(vec_sub(radial_homeo_apply(h2, far), far).is_zero());

    Rng rng(78);
    for (int i = 0; i < 400; ++i) {
        const SeqVec x = random_vec(rng, IndexWindow(-3, 3), 3, 0.8);
        const SeqVec there = radial_homeo_apply(h, x);
        CHECK(dist(fam, 1, radial_homeo_inverse_apply(h, there), x) <= 1e-9);
    }

    // An endpoint the seminorm cannot distinguish from the center is first
    // separated by displacing the hub along a visible free coordinate.
    const SeminormFamily prod = SeminormFamily::omega_product();
    const SeqVec null_a = single(5, 0.5); // invisible at grade 1
    const SeqVec vis_b = single(0, 0.3);
    const BallHomeo hn = radial_homeo(origin, 1.0, prod, 1, null_a, vis_b);
    REQUIRE(hn.stages.size() == 2);
    CHECK(dist(prod, 1, radial_homeo_apply(hn, null_a), vis_b) <= 1e-12);
    // The hidden coordinate is genuinely rewritten, not just renormed away.
    CHECK(radial_homeo_apply(hn, null_a).at(5) == doctest::Approx(0.0).epsilon(1e-12));

    // Guard rails.
    CHECK_THROWS_AS(radial_homeo(origin, 0.0, fam, 1, a, b), PreconditionError);
    CHECK_THROWS_AS(radial_homeo(origin, 1.0, fam, 1, single(0, 1.2), b),
                    PreconditionError);
}

TEST_CASE("radial chains compose waypoint legs") {
    const SeminormFamily fam = SeminormFamily::lp(2.0);
    const SeqVec origin(IndexWindow(-8, 8));
    SeqVec w2(IndexWindow(-8, 8));
    w2.set(0, -0.3);
    w2.set(1, 0.1);
    const std::vector<SeqVec> pts = {single(0, 0.2), single(0, 0.4), w2};

    const BallHomeo h = radial_homeo_chain(origin, 1.0, fam, 1, pts);
    // First leg rides the shared ray (one stage); the reversal needs a hub.
    CHECK(h.stages.size() == 3);
    CHECK(dist(fam, 1, radial_homeo_apply(h, pts.front()), pts.back()) <= 1e-9);

    const SeqVec far = single(2, 1.5);
    CHECK(vec_sub(radial_homeo_apply(h, far), far).is_zero());

    Rng rng(79);
    for (int i = 0; i < 200; ++i) {
        const SeqVec x = random_vec(rng, IndexWindow(-3, 3), 3, 0.8);
        const SeqVec there = radial_homeo_apply(h, x);
        CHECK(dist(fam, 1, radial_homeo_inverse_apply(h, there), x) <= 1e-9);
    }

    // A single waypoint is a valid (empty) chain.
    const BallHomeo lone = radial_homeo_chain(origin, 1.0, fam, 1, {pts[0]});
    CHECK(lone.stages.empty());

    CHECK_THROWS_AS(radial_homeo_chain(origin, 1.0, fam, 1, {}), PreconditionError);
    CHECK_THROWS_AS(radial_homeo_chain(origin, 1.0, fam, 1, {single(0, 1.0)}),
                    PreconditionError);
}
