// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ibpcert/numeric.hpp"

namespace ibpcert {

/// Closed, non-empty, axis-aligned box (l_inf ball): one [lower, upper]
/// interval per dimension. Immutable after construction.
class Box {
public:
    Box(std::vector<Scalar> lower, std::vector<Scalar> upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.empty() || lower_.size() != upper_.size())
            throw DimensionError("box bounds must be non-empty and equal length");
        for (size_t i = 0; i < lower_.size(); ++i)
            if (lower_[i] > upper_[i])
                throw Error("box with lower > upper in dimension " + std::to_string(i));
    }

    static Box interval(Scalar lo, Scalar hi) {
        return Box({std::move(lo)}, {std::move(hi)});
    }
    static Box degenerate(Point p) { return Box(p, p); }
    static Box ball(const Point& center, const Scalar& radius) {
        if (radius.sign() < 0)
            throw PreconditionError("negative ball radius");
        std::vector<Scalar> lo, hi;
        lo.reserve(center.size());
        hi.reserve(center.size());
        for (const Scalar& c : center) {
            lo.push_back(c - radius);
            hi.push_back(c + radius);
        }
        return Box(std::move(lo), std::move(hi));
    }
    static Box from_center_radius(const Point& center, const Point& radius) {
        if (center.size() != radius.size())
            throw DimensionError("center/radius length mismatch");
        std::vector<Scalar> lo, hi;
        for (size_t i = 0; i < center.size(); ++i) {
            lo.push_back(center[i] - radius[i]);
            hi.push_back(center[i] + radius[i]);
        }
        return Box(std::move(lo), std::move(hi));
    }

    size_t dim() const { return lower_.size(); }
    const std::vector<Scalar>& lower() const { return lower_; }
    const std::vector<Scalar>& upper() const { return upper_; }
    const Scalar& lower(size_t i) const { return lower_.at(i); }
    const Scalar& upper(size_t i) const { return upper_.at(i); }

    Backend backend() const { return lower_.front().backend(); }

    Scalar center(size_t i) const {
        Scalar two = Scalar::from_int(2, lower_[i].backend());
        return (lower_[i] + upper_[i]) / two;
    }
    Scalar radius(size_t i) const {
        Scalar two = Scalar::from_int(2, lower_[i].backend());
        return (upper_[i] - lower_[i]) / two;
    }
    Point center() const {
        Point c;
        for (size_t i = 0; i < dim(); ++i)
            c.push_back(center(i));
        return c;
    }

    bool is_degenerate(size_t i) const { return lower_[i] == upper_[i]; }
    bool is_point() const {
        for (size_t i = 0; i < dim(); ++i)
            if (!is_degenerate(i))
                return false;
        return true;
    }

    bool contains(const Point& p) const {
        if (p.size() != dim())
            throw DimensionError("point/box dimension mismatch");
        for (size_t i = 0; i < dim(); ++i)
            if (p[i] < lower_[i] || upper_[i] < p[i])
                return false;
        return true;
    }

    bool contains_box(const Box& other) const {
        if (other.dim() != dim())
            throw DimensionError("box dimension mismatch");
        for (size_t i = 0; i < dim(); ++i)
            if (other.lower_[i] < lower_[i] || upper_[i] < other.upper_[i])
                return false;
        return true;
    }

    /// Restriction to one dimension (0-based).
    Box project(size_t i) const {
        if (i >= dim())
            throw DimensionError("projection index out of range");
        return Box::interval(lower_[i], upper_[i]);
    }

    /// Restriction to a contiguous block of dimensions.
    Box project_block(size_t start, size_t len) const {
        if (len == 0 || start + len > dim())
            throw DimensionError("projection block out of range");
        std::vector<Scalar> lo(lower_.begin() + start, lower_.begin() + start + len);
        std::vector<Scalar> hi(upper_.begin() + start, upper_.begin() + start + len);
        return Box(std::move(lo), std::move(hi));
    }

    friend bool operator==(const Box& a, const Box& b) {
        return a.lower_ == b.lower_ && a.upper_ == b.upper_;
    }
    friend bool operator!=(const Box& a, const Box& b) { return !(a == b); }

private:
    std::vector<Scalar> lower_, upper_;
};

inline Box product(const Box& a, const Box& b) {
    std::vector<Scalar> lo = a.lower(), hi = a.upper();
    lo.insert(lo.end(), b.lower().begin(), b.lower().end());
    hi.insert(hi.end(), b.upper().begin(), b.upper().end());
    return Box(std::move(lo), std::move(hi));
}

/// A is a subset of the relative interior of B. Per dimension: either B is
/// degenerate there and A coincides with it, or containment is strict on
/// both sides. Exact comparisons; no tolerance in either backend.
inline bool is_relative_subset(const Box& a, const Box& b) {
    if (a.dim() != b.dim())
        throw DimensionError("relative-subset on unequal dimensions");
    for (size_t i = 0; i < a.dim(); ++i) {
        if (b.is_degenerate(i)) {
            if (!(a.lower(i) == b.lower(i) && a.upper(i) == b.lower(i)))
                return false;
        } else if (!(b.lower(i) < a.lower(i) && a.upper(i) < b.upper(i))) {
            return false;
        }
    }
    return true;
}

// Exact interval images of the scalar operations (dimension-1 boxes).

inline Box box_add(const Box& a, const Box& b) {
    if (a.dim() != 1 || b.dim() != 1)
        throw DimensionError("box_add takes scalar boxes");
    return Box::interval(a.lower(0) + b.lower(0), a.upper(0) + b.upper(0));
}

inline Box box_scale(const Scalar& k, const Box& b) {
    if (b.dim() != 1)
        throw DimensionError("box_scale takes a scalar box");
    Scalar lo = k * b.lower(0), hi = k * b.upper(0);
    if (hi < lo)
        std::swap(lo, hi);
    return Box::interval(std::move(lo), std::move(hi));
}

inline Box box_relu(const Box& b) {
    if (b.dim() != 1)
        throw DimensionError("box_relu takes a scalar box");
    return Box::interval(relu(b.lower(0)), relu(b.upper(0)));
}

inline Box box_const(const Scalar& k) { return Box::interval(k, k); }

/// Finite, non-empty, deduplicated set of concrete points; the engine's
/// stand-in for the compact sets of the inversion and witness statements.
/// Points are kept in a canonical sorted order.
class PointSet {
public:
    PointSet(size_t dim, std::vector<Point> points) : dim_(dim) {
        if (dim == 0)
            throw DimensionError("zero-dimensional point set");
        if (points.empty())
            throw PreconditionError("point set must be non-empty");
        for (const Point& p : points)
            if (p.size() != dim)
                throw DimensionError("point of wrong dimension in point set");
        std::sort(points.begin(), points.end(), lex_less);
        points.erase(std::unique(points.begin(), points.end()), points.end());
        points_ = std::move(points);
    }

    static PointSet singleton(Point p) {
        size_t d = p.size();
        return PointSet(d, {std::move(p)});
    }

    size_t dim() const { return dim_; }
    size_t size() const { return points_.size(); }
    const std::vector<Point>& points() const { return points_; }

    Box hull() const {
        std::vector<Scalar> lo = points_.front(), hi = points_.front();
        for (const Point& p : points_)
            for (size_t i = 0; i < dim_; ++i) {
                if (p[i] < lo[i])
                    lo[i] = p[i];
                if (hi[i] < p[i])
                    hi[i] = p[i];
            }
        return Box(std::move(lo), std::move(hi));
    }

    PointSet project_block(size_t start, size_t len) const {
        if (len == 0 || start + len > dim_)
            throw DimensionError("projection block out of range");
        std::vector<Point> pts;
        pts.reserve(points_.size());
        for (const Point& p : points_)
            pts.emplace_back(p.begin() + start, p.begin() + start + len);
        return PointSet(len, std::move(pts));
    }

private:
    static bool lex_less(const Point& a, const Point& b) {
        for (size_t i = 0; i < a.size(); ++i) {
            int c = a[i].cmp(b[i]);
            if (c != 0)
                return c < 0;
        }
        return false;
    }

    size_t dim_;
    std::vector<Point> points_;
};

/// Smallest axis-aligned box containing the set (the l_inf hull).
inline Box hull(const PointSet& s) { return s.hull(); }

} // namespace ibpcert
