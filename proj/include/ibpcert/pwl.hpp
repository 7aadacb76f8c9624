// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ibpcert/net.hpp"

namespace ibpcert {

/// Continuous piecewise-linear function R -> R with exact rational
/// breakpoints and pieces. pieces()[i] applies between breakpoints i-1 and
/// i; the first and last pieces extend to -inf / +inf. Rational backend
/// only: the whole point of this representation is exact root isolation.
class PwlFunction {
public:
    struct Piece {
        Scalar slope, intercept;
        bool operator==(const Piece& o) const {
            return slope == o.slope && intercept == o.intercept;
        }
        Scalar at(const Scalar& x) const { return slope * x + intercept; }
    };

    static PwlFunction constant(Scalar c) {
        return PwlFunction({}, {Piece{Scalar::rational(0), check_rational(std::move(c))}});
    }
    static PwlFunction identity() {
        return PwlFunction({}, {Piece{Scalar::rational(1), Scalar::rational(0)}});
    }

    const std::vector<Scalar>& breakpoints() const { return breaks_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    Scalar value(const Scalar& x) const {
        return pieces_[segment_index(x)].at(x);
    }

    PwlFunction scaled(const Scalar& k) const {
        std::vector<Piece> ps;
        ps.reserve(pieces_.size());
        for (const Piece& p : pieces_)
            ps.push_back({k * p.slope, k * p.intercept});
        return PwlFunction(breaks_, std::move(ps)).normalized();
    }

    PwlFunction plus(const PwlFunction& other) const {
        std::vector<Scalar> breaks = merge_breaks(breaks_, other.breaks_);
        std::vector<Piece> ps;
        ps.reserve(breaks.size() + 1);
        for (size_t seg = 0; seg <= breaks.size(); ++seg) {
            Scalar probe = segment_probe(breaks, seg);
            const Piece& a = pieces_[segment_index(probe)];
            const Piece& b = other.pieces_[other.segment_index(probe)];
            ps.push_back({a.slope + b.slope, a.intercept + b.intercept});
        }
        return PwlFunction(std::move(breaks), std::move(ps)).normalized();
    }

    /// max(f, 0): inserts the exact zero crossings as breakpoints and clamps
    /// the negative pieces.
    PwlFunction clamped() const {
        std::vector<Scalar> breaks = breaks_;
        for (size_t seg = 0; seg < pieces_.size(); ++seg) {
            const Piece& p = pieces_[seg];
            if (p.slope.sign() == 0)
                continue;
            Scalar root = -p.intercept / p.slope;
            bool above = seg == 0 || breaks_[seg - 1] < root;
            bool below = seg == pieces_.size() - 1 || root < breaks_[seg];
            if (above && below)
                breaks.push_back(root);
        }
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        std::vector<Piece> ps;
        for (size_t seg = 0; seg <= breaks.size(); ++seg) {
            Scalar probe = segment_probe(breaks, seg);
            const Piece& p = pieces_[segment_index(probe)];
            if (p.at(probe).sign() < 0)
                ps.push_back({Scalar::rational(0), Scalar::rational(0)});
            else
                ps.push_back(p);
        }
        return PwlFunction(std::move(breaks), std::move(ps)).normalized();
    }

    /// Maximal closed intervals on which the function is exactly zero,
    /// intersected with [lo, hi] (single points appear as degenerate
    /// intervals).
    std::vector<std::pair<Scalar, Scalar>> zeros_in(const Scalar& lo,
                                                    const Scalar& hi) const {
        if (hi < lo)
            throw PreconditionError("empty zero-query interval");
        std::vector<std::pair<Scalar, Scalar>> out;
        auto push = [&](Scalar a, Scalar b) {
            if (a < lo)
                a = lo;
            if (hi < b)
                b = hi;
            if (b < a)
                return;
            if (!out.empty() && out.back().second == a)
                out.back().second = b;
            else
                out.push_back({std::move(a), std::move(b)});
        };
        for (size_t seg = 0; seg <= breaks_.size(); ++seg) {
            Scalar seg_lo = seg == 0 ? lo : max(lo, breaks_[seg - 1]);
            Scalar seg_hi = seg == breaks_.size() ? hi : min(hi, breaks_[seg]);
            if (seg_hi < seg_lo)
                continue;
            const Piece& p = pieces_[seg];
            if (p.slope.sign() == 0) {
                if (p.intercept.sign() == 0)
                    push(seg_lo, seg_hi);
            } else {
                Scalar root = -p.intercept / p.slope;
                if (seg_lo <= root && root <= seg_hi)
                    push(root, root);
            }
        }
        return out;
    }

private:
    PwlFunction(std::vector<Scalar> breaks, std::vector<Piece> pieces)
        : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
        for (const Scalar& b : breaks_)
            check_rational(b);
    }

    static Scalar check_rational(Scalar s) {
        if (!s.is_rational())
            throw BackendMismatch("piecewise-linear machinery is rational-only");
        return s;
    }

    /// Index of the piece covering x (ties at a breakpoint resolve right;
    /// continuity makes the value identical either way).
    size_t segment_index(const Scalar& x) const {
        size_t i = 0;
        while (i < breaks_.size() && breaks_[i] <= x)
            ++i;
        return i;
    }

    /// An interior probe point of segment seg of the given breakpoint list.
    static Scalar segment_probe(const std::vector<Scalar>& breaks, size_t seg) {
        Scalar one = Scalar::rational(1), two = Scalar::rational(2);
        if (breaks.empty())
            return Scalar::rational(0);
        if (seg == 0)
            return breaks.front() - one;
        if (seg == breaks.size())
            return breaks.back() + one;
        return (breaks[seg - 1] + breaks[seg]) / two;
    }

    static std::vector<Scalar> merge_breaks(const std::vector<Scalar>& a,
                                            const std::vector<Scalar>& b) {
        std::vector<Scalar> out;
        out.reserve(a.size() + b.size());
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    PwlFunction normalized() && {
        std::vector<Scalar> breaks;
        std::vector<Piece> ps;
        ps.push_back(pieces_.front());
        for (size_t i = 0; i < breaks_.size(); ++i) {
            if (pieces_[i + 1] == ps.back())
                continue; // same line on both sides, breakpoint is redundant
            breaks.push_back(breaks_[i]);
            ps.push_back(pieces_[i + 1]);
        }
        return PwlFunction(std::move(breaks), std::move(ps));
    }

    std::vector<Scalar> breaks_;
    std::vector<Piece> pieces_;
};

/// Push piecewise-linear inputs through a network symbolically; mirrors
/// eval case for case.
inline std::vector<PwlFunction> apply_pwl(const NetPtr& f,
                                          const std::vector<PwlFunction>& x) {
    if (x.size() != f->in_dim())
        throw DimensionError("apply_pwl input arity mismatch");
    switch (f->kind()) {
    case NodeKind::sequential:
        return apply_pwl(f->first(), apply_pwl(f->second(), x));
    case NodeKind::duplicate: {
        std::vector<PwlFunction> out = x;
        out.insert(out.end(), x.begin(), x.end());
        return out;
    }
    case NodeKind::parallel: {
        size_t split = f->first()->in_dim();
        std::vector<PwlFunction> left(x.begin(), x.begin() + split);
        std::vector<PwlFunction> right(x.begin() + split, x.end());
        std::vector<PwlFunction> out = apply_pwl(f->first(), left);
        std::vector<PwlFunction> more = apply_pwl(f->second(), right);
        out.insert(out.end(), more.begin(), more.end());
        return out;
    }
    case NodeKind::constant:
        return {PwlFunction::constant(f->kappa())};
    case NodeKind::scale:
        return {x[0].scaled(f->kappa())};
    case NodeKind::relu:
        return {x[0].clamped()};
    case NodeKind::add:
        return {x[0].plus(x[1])};
    }
    throw InternalCheckError("unreachable node kind");
}

/// The scalar function computed by a 1 -> 1 network, in closed piecewise
/// form.
inline PwlFunction scalar_pwl(const NetPtr& f) {
    if (f->in_dim() != 1 || f->out_dim() != 1)
        throw DimensionError("scalar_pwl needs a 1 -> 1 network");
    return apply_pwl(f, {PwlFunction::identity()})[0];
}

} // namespace ibpcert
