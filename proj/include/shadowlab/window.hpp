#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "shadowlab/errors.hpp"

namespace shadowlab {

/// Default cap on the width of an index window (number of integer sites).
inline constexpr std::int64_t kWindowCapDefault = std::int64_t{1} << 20;

/// A contiguous block of integer indices [lo, hi], both ends inclusive.
struct IndexWindow {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    IndexWindow() = default;
    IndexWindow(std::int64_t lo_, std::int64_t hi_, std::int64_t cap = kWindowCapDefault);

    std::int64_t width() const { return hi - lo + 1; }
    bool contains(std::int64_t j) const { return lo <= j && j <= hi; }

    /// Smallest window containing both operands.  Throws WindowCapError if the
    /// result would be wider than `cap`.
    static IndexWindow hull(const IndexWindow& a, const IndexWindow& b,
                            std::int64_t cap = kWindowCapDefault);

    /// Window translated by `shift` sites (width unchanged, never violates the cap).
    IndexWindow translated(std::int64_t shift) const;

    bool operator==(const IndexWindow&) const = default;
};

/// A finitely supported sequence over the integers: coefficients live inside a
/// declared window and are implicitly zero elsewhere.  Exact zeros are never
/// stored, so the coefficient map *is* the support.
class SeqVec {
public:
    SeqVec() = default;
    explicit SeqVec(IndexWindow window) : window_(window) {}

    /// Build from explicit coefficients.  Every index must lie inside `window`,
    /// every value must be finite; exact zeros are dropped.
    SeqVec(IndexWindow window, const std::map<std::int64_t, double>& coeffs);

    const IndexWindow& window() const { return window_; }
    const std::map<std::int64_t, double>& coeffs() const { return coeffs_; }

    double at(std::int64_t j) const;
    /// Set one coefficient (0 erases).  `j` must lie inside the window.
    void set(std::int64_t j, double value);

    bool is_zero() const { return coeffs_.empty(); }

    /// Span [min, max] of the nonzero coordinates; empty for the zero vector.
    std::optional<IndexWindow> support() const;

    /// Widen the declared window (hull with `w`); coefficients are unchanged.
    void merge_window(const IndexWindow& w, std::int64_t cap = kWindowCapDefault);

    bool operator==(const SeqVec&) const = default;

private:
    IndexWindow window_;
    std::map<std::int64_t, double> coeffs_;
};

/// alpha*x + y, exact coefficient-wise; result window = hull of the operand windows.
SeqVec vec_axpy(double alpha, const SeqVec& x, const SeqVec& y);

/// x - y, exact coefficient-wise; result window = hull of the operand windows.
SeqVec vec_sub(const SeqVec& x, const SeqVec& y);

/// alpha*x on the same window.
SeqVec vec_scale(double alpha, const SeqVec& x);

/// Unit coordinate vector e_j on the given window (must contain j).
SeqVec unit_vector(std::int64_t j, IndexWindow window);

} // namespace shadowlab
