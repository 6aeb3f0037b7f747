#include "shadowlab/weights.hpp"

#include <cmath>
#include <cstdlib>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

double abs_index_plus_one(std::int64_t j) {
    // |j|+1 as a double; exact for every index a window can hold.
    return static_cast<double>(j < 0 ? -j : j) + 1.0;
}

} // namespace

double TailRule::eval(std::int64_t j) const {
    if (kind == Kind::Constant) return value;
    const double base = abs_index_plus_one(j);
    const double r = positive_sign ? exponent : -exponent;
    return std::pow(base, r);
}

TailClass TailRule::magnitude_class() const {
    if (kind == Kind::Constant) return TailClass::constant(value);
    return TailClass::poly(positive_sign ? exponent : -exponent);
}

WeightSequence::WeightSequence(std::map<std::int64_t, double> table, TailRule left,
                               TailRule right)
    : table_(std::move(table)), left_(left), right_(right) {
    if (!table_.empty()) {
        IndexWindow w;
        w.lo = table_.begin()->first;
        w.hi = table_.rbegin()->first;
        core_ = w;
    }
    for (const auto& [j, v] : table_) {
        if (!std::isfinite(v) || v == 0.0) {
            throw PreconditionError("WeightSequence: weight at index " + std::to_string(j) +
                                    " must be finite and nonzero");
        }
    }
    for (const TailRule* rule : {&left_, &right_}) {
        if (rule->kind == TailRule::Kind::Constant) {
            if (!std::isfinite(rule->value) || rule->value == 0.0) {
                throw PreconditionError("WeightSequence: constant tail value must be finite "
                                        "and nonzero");
            }
        } else if (!(rule->exponent > 0.0) || !std::isfinite(rule->exponent)) {
            throw PreconditionError("WeightSequence: power-law tail exponent must be positive");
        }
    }
}

WeightSequence WeightSequence::constant(double v) {
    return WeightSequence({}, TailRule::constant(v), TailRule::constant(v));
}

double WeightSequence::value(std::int64_t j) const {
    if (core_ && core_->contains(j)) {
        return table_.at(j);
    }
    if (core_ && j < core_->lo) return left_.eval(j);
    if (core_ && j > core_->hi) return right_.eval(j);
    // Empty table: split the line at 0 so each side is governed by its rule.
    return j < 0 ? left_.eval(j) : right_.eval(j);
}

std::int64_t WeightSequence::tail_start(bool right_side) const {
    if (core_) return right_side ? core_->hi + 1 : core_->lo - 1;
    return right_side ? 0 : -1;
}

} // namespace shadowlab
