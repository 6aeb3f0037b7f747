#include "shadowlab/window.hpp"

#include <cmath>
#include <string>

namespace shadowlab {

IndexWindow::IndexWindow(std::int64_t lo_, std::int64_t hi_, std::int64_t cap)
    : lo(lo_), hi(hi_) {
    if (hi < lo) {
        throw PreconditionError("IndexWindow: hi < lo (" + std::to_string(lo_) + ", " +
                                std::to_string(hi_) + ")");
    }
    if (width() > cap) {
        throw WindowCapError("IndexWindow: width " + std::to_string(width()) +
                             " exceeds cap " + std::to_string(cap));
    }
}

IndexWindow IndexWindow::hull(const IndexWindow& a, const IndexWindow& b, std::int64_t cap) {
    return IndexWindow(std::min(a.lo, b.lo), std::max(a.hi, b.hi), cap);
}

IndexWindow IndexWindow::translated(std::int64_t shift) const {
    IndexWindow w;
    w.lo = lo + shift;
    w.hi = hi + shift;
    return w;
}

SeqVec::SeqVec(IndexWindow window, const std::map<std::int64_t, double>& coeffs)
    : window_(window) {
    for (const auto& [j, v] : coeffs) {
        if (!window_.contains(j)) {
            throw PreconditionError("SeqVec: index " + std::to_string(j) +
                                    " outside window [" + std::to_string(window_.lo) + ", " +
                                    std::to_string(window_.hi) + "]");
        }
        if (!std::isfinite(v)) {
            throw PreconditionError("SeqVec: non-finite coefficient at index " +
                                    std::to_string(j));
        }
        if (v != 0.0) coeffs_[j] = v;
    }
}

double SeqVec::at(std::int64_t j) const {
    auto it = coeffs_.find(j);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void SeqVec::set(std::int64_t j, double value) {
    if (!window_.contains(j)) {
        throw PreconditionError("SeqVec::set: index " + std::to_string(j) +
                                " outside window [" + std::to_string(window_.lo) + ", " +
                                std::to_string(window_.hi) + "]");
    }
    if (!std::isfinite(value)) {
        throw PreconditionError("SeqVec::set: non-finite coefficient at index " +
                                std::to_string(j));
    }
    if (value == 0.0) {
        coeffs_.erase(j);
    } else {
        coeffs_[j] = value;
    }
}

std::optional<IndexWindow> SeqVec::support() const {
    if (coeffs_.empty()) return std::nullopt;
    IndexWindow s;
    s.lo = coeffs_.begin()->first;
    s.hi = coeffs_.rbegin()->first;
    return s;
}

void SeqVec::merge_window(const IndexWindow& w, std::int64_t cap) {
    window_ = IndexWindow::hull(window_, w, cap);
}

SeqVec vec_axpy(double alpha, const SeqVec& x, const SeqVec& y) {
    SeqVec r(IndexWindow::hull(x.window(), y.window()));
    for (const auto& [j, v] : x.coeffs()) r.set(j, alpha * v);
    for (const auto& [j, v] : y.coeffs()) r.set(j, r.at(j) + v);
    return r;
}

SeqVec vec_sub(const SeqVec& x, const SeqVec& y) {
    SeqVec r(IndexWindow::hull(x.window(), y.window()));
    for (const auto& [j, v] : x.coeffs()) r.set(j, v);
    for (const auto& [j, v] : y.coeffs()) r.set(j, r.at(j) - v);
    return r;
}

SeqVec vec_scale(double alpha, const SeqVec& x) {
    SeqVec r(x.window());
    for (const auto& [j, v] : x.coeffs()) r.set(j, alpha * v);
    return r;
}

SeqVec unit_vector(std::int64_t j, IndexWindow window) {
    SeqVec r(window);
    r.set(j, 1.0);
    return r;
}

} // namespace shadowlab
