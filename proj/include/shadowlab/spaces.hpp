#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shadowlab/growth.hpp"
#include "shadowlab/weights.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

/// base^k by binary exponentiation (k >= 0).  Used instead of std::pow for
/// integer exponents so evaluation is deterministic across libm builds.
double ipow(double base, int k);

/// A grade matrix a(j, k) over integer sites j and grades k >= 1.
/// Invariants: 0 <= a(j,k) <= a(j,k+1); every site has some positive grade
/// (checked by kothe_validate over a window, not enforced globally).
struct KotheMatrix {
    enum class Kind {
        Constant,         // a(j,k) = value
        PolynomialGrade,  // a(j,k) = (|j|+1)^k
        BandIndicator,    // a(j,k) = 1 if |j| <= band(k) else 0
        Table,            // explicit values over window x grades; 0 outside
        WeightedConstant, // a(j,k) = v_j from a positive weight sequence
    };

    Kind kind = Kind::Constant;
    double constant_value = 1.0;                       // Constant
    std::map<int, std::int64_t> bands;                 // BandIndicator (default band(k) = k)
    IndexWindow table_window;                          // Table
    std::map<int, std::map<std::int64_t, double>> table_values; // Table: grade -> site -> value
    WeightSequence weights;                            // WeightedConstant

    static KotheMatrix constant(double v);
    static KotheMatrix polynomial_grade();
    static KotheMatrix band_indicator(std::map<int, std::int64_t> bands = {});
    static KotheMatrix table(IndexWindow window,
                             std::map<int, std::map<std::int64_t, double>> values);
    static KotheMatrix weighted_constant(WeightSequence v);

    double entry(std::int64_t j, int grade) const;
    std::int64_t band(int grade) const;

    /// Exact behavior of j -> a(j, grade) on one tail.
    TailClass row_class(int grade, bool right_side) const;

    bool operator==(const KotheMatrix&) const = default;
};

/// One violation of the grade-matrix invariants.
struct KotheViolation {
    enum class Kind { Negative, NotMonotone, AllZeroRow };
    Kind kind;
    std::int64_t site;
    int grade; // smallest grade involved; 0 for AllZeroRow
};

struct KotheValidation {
    bool ok = true;
    std::vector<KotheViolation> violations;
};

/// Check both matrix invariants for all sites in `window` and grades
/// 1..max_grade; reports every violating (site, grade) pair.
KotheValidation kothe_validate(const KotheMatrix& A, IndexWindow window, int max_grade);

/// A graded family of seminorms on finitely supported sequences.  Grades are
/// 1-based; families whose seminorm does not depend on the grade simply
/// ignore it.  Every family evaluates through the same grade-matrix core, so
/// the convenience kinds agree bit-for-bit with their KothePrimary form.
struct SeminormFamily {
    enum class Kind { Lp, C0, RapidDecrease, KothePrimary, OmegaProduct };

    Kind kind = Kind::Lp;
    double p = 2.0;       // Lp exponent, or KothePrimary exponent (0 = sup)
    KotheMatrix matrix;   // KothePrimary; synthesized for the other kinds

    static SeminormFamily lp(double p);
    static SeminormFamily c0();
    static SeminormFamily rapid_decrease();
    static SeminormFamily kothe(KotheMatrix A, double p);
    static SeminormFamily omega_product();

    /// The (matrix, p) pair actually evaluated.
    const KotheMatrix& effective_matrix() const { return matrix; }
    double effective_p() const;
    bool grade_independent() const;

    bool operator==(const SeminormFamily&) const = default;
};

/// || x ||_grade for the family.  Exact summation over the support; overflow
/// is reported as +infinity, never thrown.
double seminorm_eval(const SeminormFamily& fam, int grade, const SeqVec& x);

} // namespace shadowlab
