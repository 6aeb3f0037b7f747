#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "shadowlab/growth.hpp"
#include "shadowlab/window.hpp"

namespace shadowlab {

/// Rule for weight values outside the core table.
///   Constant:  w_j = value           (value != 0)
///   PowerLaw:  w_j = (|j|+1)^(+r) or (|j|+1)^(-r), r > 0
struct TailRule {
    enum class Kind { Constant, PowerLaw };
    Kind kind = Kind::Constant;
    double value = 1.0;     // Constant
    double exponent = 1.0;  // PowerLaw: r > 0
    bool positive_sign = true;

    static TailRule constant(double v) {
        TailRule t;
        t.kind = Kind::Constant;
        t.value = v;
        return t;
    }
    static TailRule power_law(double r, bool positive) {
        TailRule t;
        t.kind = Kind::PowerLaw;
        t.exponent = r;
        t.positive_sign = positive;
        return t;
    }

    double eval(std::int64_t j) const;
    /// Exact |w_j| behavior on a tail, as a polynomial class in (|j|+1).
    TailClass magnitude_class() const;

    bool operator==(const TailRule&) const = default;
};

/// A two-sided weight sequence: explicit values on a core window, tail rules
/// on either side.  All values are finite and nonzero.
class WeightSequence {
public:
    WeightSequence() = default;
    WeightSequence(std::map<std::int64_t, double> table, TailRule left, TailRule right);

    /// Constant sequence w_j = v everywhere (empty core table).
    static WeightSequence constant(double v);

    double value(std::int64_t j) const;

    /// Core window of the explicit table; nullopt when the table is empty.
    std::optional<IndexWindow> core() const { return core_; }
    const std::map<std::int64_t, double>& table() const { return table_; }
    const TailRule& left_tail() const { return left_; }
    const TailRule& right_tail() const { return right_; }

    /// First index on the given side that the tail rule governs.
    std::int64_t tail_start(bool right_side) const;

    bool operator==(const WeightSequence&) const = default;

private:
    std::map<std::int64_t, double> table_;
    std::optional<IndexWindow> core_;
    TailRule left_;
    TailRule right_;
};

} // namespace shadowlab
