#include "shadowlab/spaces.hpp"

#include <cmath>

#include "shadowlab/errors.hpp"

namespace shadowlab {

double ipow(double base, int k) {
    if (k < 0) throw PreconditionError("ipow: negative exponent");
    double acc = 1.0;
    double b = base;
    while (k > 0) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

KotheMatrix KotheMatrix::constant(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw PreconditionError("KotheMatrix::constant: value must be finite and >= 0");
    }
    KotheMatrix a;
    a.kind = Kind::Constant;
    a.constant_value = v;
    return a;
}

KotheMatrix KotheMatrix::polynomial_grade() {
    KotheMatrix a;
    a.kind = Kind::PolynomialGrade;
    return a;
}

KotheMatrix KotheMatrix::band_indicator(std::map<int, std::int64_t> bands) {
    KotheMatrix a;
    a.kind = Kind::BandIndicator;
    a.bands = std::move(bands);
    std::int64_t prev = -1;
    int prev_grade = 0;
    for (const auto& [k, b] : a.bands) {
        if (k < 1 || b < 0) {
            throw PreconditionError("KotheMatrix::band_indicator: grades are >= 1, bands >= 0");
        }
        if (prev_grade > 0 && b < prev) {
            throw PreconditionError("KotheMatrix::band_indicator: bands must be nondecreasing");
        }
        prev = b;
        prev_grade = k;
    }
    return a;
}

KotheMatrix KotheMatrix::table(IndexWindow window,
                               std::map<int, std::map<std::int64_t, double>> values) {
    KotheMatrix a;
    a.kind = Kind::Table;
    a.table_window = window;
    a.table_values = std::move(values);
    for (const auto& [k, row] : a.table_values) {
        if (k < 1) throw PreconditionError("KotheMatrix::table: grades are >= 1");
        for (const auto& [j, v] : row) {
            if (!window.contains(j)) {
                throw PreconditionError("KotheMatrix::table: site " + std::to_string(j) +
                                        " outside the table window");
            }
            if (!std::isfinite(v) || v < 0.0) {
                throw PreconditionError("KotheMatrix::table: entries must be finite and >= 0");
            }
        }
    }
    return a;
}

KotheMatrix KotheMatrix::weighted_constant(WeightSequence v) {
    KotheMatrix a;
    a.kind = Kind::WeightedConstant;
    a.weights = std::move(v);
    // Positivity: table values are nonzero by WeightSequence's invariant; we
    // additionally require them (and the tail rules) to be positive.
    for (const auto& [j, val] : a.weights.table()) {
        if (val <= 0.0) {
            throw PreconditionError("KotheMatrix::weighted_constant: v_" + std::to_string(j) +
                                    " must be positive");
        }
    }
    for (bool right : {false, true}) {
        const TailRule& r = right ? a.weights.right_tail() : a.weights.left_tail();
        if (r.kind == TailRule::Kind::Constant && r.value <= 0.0) {
            throw PreconditionError(
                "KotheMatrix::weighted_constant: tail values must be positive");
        }
    }
    return a;
}

std::int64_t KotheMatrix::band(int grade) const {
    auto it = bands.find(grade);
    return it == bands.end() ? static_cast<std::int64_t>(grade) : it->second;
}

double KotheMatrix::entry(std::int64_t j, int grade) const {
    if (grade < 1) throw PreconditionError("KotheMatrix::entry: grades are 1-based");
    switch (kind) {
        case Kind::Constant:
            return constant_value;
        case Kind::PolynomialGrade: {
            const double base = static_cast<double>(j < 0 ? -j : j) + 1.0;
            return ipow(base, grade);
        }
        case Kind::BandIndicator: {
            const std::int64_t aj = j < 0 ? -j : j;
            return aj <= band(grade) ? 1.0 : 0.0;
        }
        case Kind::Table: {
            auto row = table_values.find(grade);
            if (row == table_values.end()) return 0.0;
            auto it = row->second.find(j);
            return it == row->second.end() ? 0.0 : it->second;
        }
        case Kind::WeightedConstant:
            return weights.value(j);
    }
    return 0.0;
}

TailClass KotheMatrix::row_class(int grade, bool right_side) const {
    switch (kind) {
        case Kind::Constant:
            return constant_value == 0.0 ? TailClass::zero()
                                         : TailClass::constant(constant_value);
        case Kind::PolynomialGrade:
            return TailClass::poly(static_cast<double>(grade));
        case Kind::BandIndicator:
            return TailClass::zero();
        case Kind::Table:
            return TailClass::zero(); // entries vanish outside the table window
        case Kind::WeightedConstant: {
            const TailRule& r = right_side ? weights.right_tail() : weights.left_tail();
            return r.magnitude_class();
        }
    }
    return TailClass::unknown();
}

namespace {

/// Does site j carry a positive entry at ANY grade (not only the inspected
/// ones)?  Band rows turn positive at grade |j| and weighted rows are
/// positive by construction, so only explicitly tabulated matrices and the
/// zero constant can have genuinely dead sites.
bool row_positive_somewhere(const KotheMatrix& A, std::int64_t j) {
    switch (A.kind) {
        case KotheMatrix::Kind::Constant:
            return A.constant_value > 0.0;
        case KotheMatrix::Kind::PolynomialGrade:
        case KotheMatrix::Kind::WeightedConstant:
            return true;
        case KotheMatrix::Kind::BandIndicator:
            // band(k) falls back to k beyond the custom map, so grade
            // max(|j|, 1) already covers the site.
            return true;
        case KotheMatrix::Kind::Table:
            for (const auto& [grade, row] : A.table_values) {
                (void)grade;
                const auto it = row.find(j);
                if (it != row.end() && it->second > 0.0) return true;
            }
            return false;
    }
    return false;
}

} // namespace

KotheValidation kothe_validate(const KotheMatrix& A, IndexWindow window, int max_grade) {
    if (max_grade < 1) throw PreconditionError("kothe_validate: max_grade must be >= 1");
    KotheValidation out;
    for (std::int64_t j = window.lo; j <= window.hi; ++j) {
        double prev = 0.0;
        for (int k = 1; k <= max_grade; ++k) {
            const double v = A.entry(j, k);
            if (v < 0.0) {
                out.violations.push_back({KotheViolation::Kind::Negative, j, k});
            }
            if (k > 1 && v < prev) {
                out.violations.push_back({KotheViolation::Kind::NotMonotone, j, k});
            }
            prev = v;
        }
        if (!row_positive_somewhere(A, j)) {
            out.violations.push_back({KotheViolation::Kind::AllZeroRow, j, 0});
        }
    }
    out.ok = out.violations.empty();
    return out;
}

SeminormFamily SeminormFamily::lp(double p) {
    if (!(p >= 1.0)) throw PreconditionError("SeminormFamily::lp: p must be >= 1");
    SeminormFamily f;
    f.kind = Kind::Lp;
    f.p = p;
    f.matrix = KotheMatrix::constant(1.0);
    return f;
}

SeminormFamily SeminormFamily::c0() {
    SeminormFamily f;
    f.kind = Kind::C0;
    f.p = 0.0;
    f.matrix = KotheMatrix::constant(1.0);
    return f;
}

SeminormFamily SeminormFamily::rapid_decrease() {
    SeminormFamily f;
    f.kind = Kind::RapidDecrease;
    f.p = 1.0;
    f.matrix = KotheMatrix::polynomial_grade();
    return f;
}

SeminormFamily SeminormFamily::kothe(KotheMatrix A, double p) {
    if (!(p == 0.0 || p >= 1.0)) {
        throw PreconditionError("SeminormFamily::kothe: p must be 0 (sup) or >= 1");
    }
    SeminormFamily f;
    f.kind = Kind::KothePrimary;
    f.p = p;
    f.matrix = std::move(A);
    return f;
}

SeminormFamily SeminormFamily::omega_product() {
    SeminormFamily f;
    f.kind = Kind::OmegaProduct;
    f.p = 0.0;
    f.matrix = KotheMatrix::band_indicator();
    return f;
}

double SeminormFamily::effective_p() const { return p; }

bool SeminormFamily::grade_independent() const {
    return matrix.kind == KotheMatrix::Kind::Constant ||
           matrix.kind == KotheMatrix::Kind::WeightedConstant;
}

double seminorm_eval(const SeminormFamily& fam, int grade, const SeqVec& x) {
    if (grade < 1) throw PreconditionError("seminorm_eval: grades are 1-based");
    const KotheMatrix& A = fam.effective_matrix();
    const double p = fam.effective_p();
    if (p == 0.0) {
        double sup = 0.0;
        for (const auto& [j, v] : x.coeffs()) {
            const double term = std::fabs(v) * A.entry(j, grade);
            if (term > sup) sup = term;
        }
        return sup;
    }
    if (p == 1.0) {
        double sum = 0.0;
        for (const auto& [j, v] : x.coeffs()) sum += std::fabs(v) * A.entry(j, grade);
        return sum;
    }
    double sum = 0.0;
    for (const auto& [j, v] : x.coeffs()) {
        const double term = std::fabs(v) * A.entry(j, grade);
        if (term > 0.0) sum += std::pow(term, p);
    }
    if (std::isinf(sum)) return sum;
    if (p == 2.0) return std::sqrt(sum);
    return std::pow(sum, 1.0 / p);
}

} // namespace shadowlab
