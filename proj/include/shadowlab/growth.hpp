#pragma once

#include <cmath>
#include <optional>
#include <string>

namespace shadowlab {

/// Exact description of how a positive quantity q(j) behaves on one tail of
/// the integers: either identically zero, of the polynomial form
/// exp(log_coeff) * (|j|+1)^exponent, or unspecified (table-backed data with
/// no rule beyond its window).
struct TailClass {
    enum class Kind { Zero, Poly, Unknown };
    Kind kind = Kind::Unknown;
    double exponent = 0.0;
    double log_coeff = 0.0;

    static TailClass zero() { return {Kind::Zero, 0.0, 0.0}; }
    static TailClass constant(double value) {
        return {Kind::Poly, 0.0, std::log(std::fabs(value))};
    }
    static TailClass poly(double exponent, double log_coeff = 0.0) {
        return {Kind::Poly, exponent, log_coeff};
    }
    static TailClass unknown() { return {Kind::Unknown, 0.0, 0.0}; }

    bool is_zero() const { return kind == Kind::Zero; }
    bool is_poly() const { return kind == Kind::Poly; }
    bool is_unknown() const { return kind == Kind::Unknown; }

    TailClass times(const TailClass& o) const {
        if (is_zero() || o.is_zero()) return zero();
        if (is_unknown() || o.is_unknown()) return unknown();
        return poly(exponent + o.exponent, log_coeff + o.log_coeff);
    }
    TailClass reciprocal() const {
        // Callers must not invert a Zero class.
        if (is_unknown()) return unknown();
        return poly(-exponent, -log_coeff);
    }
};

/// Verdict for "is q(j) bounded as |j| -> infinity along one tail".
enum class TailVerdict { Bounded, Unbounded, Inconclusive };

inline TailVerdict tail_boundedness(const TailClass& c) {
    if (c.is_zero()) return TailVerdict::Bounded;
    if (c.is_unknown()) return TailVerdict::Inconclusive;
    if (c.exponent > 0.0) return TailVerdict::Unbounded;
    return TailVerdict::Bounded;
}

/// Growth bookkeeping for a cumulative quantity
///     log Q(n) = s1 * (n log n) + s2 * n + s3 * log n + O(1)
/// such as log of a weight product times a matrix entry along an orbit.
/// The sign of the leading nonzero slot decides divergence of sup_n Q(n).
struct GrowthSlots {
    double n_log_n = 0.0;
    double linear = 0.0;
    double log_n = 0.0;

    /// +1 diverges, -1 decays to zero, 0 bounded with neither.
    int leading_sign() const {
        for (double s : {n_log_n, linear, log_n}) {
            if (s > 0.0) return 1;
            if (s < 0.0) return -1;
        }
        return 0;
    }
};

} // namespace shadowlab
