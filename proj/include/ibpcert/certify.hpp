// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "ibpcert/analyze.hpp"

namespace ibpcert {

enum class Verdict { proven_robust, not_proven };

/// Outcome of one interval certification query. margin is the signed
/// distance of the output box past zero in the label's direction: positive
/// exactly when the box proves the sign.
struct CertResult {
    Verdict verdict;
    Box output;
    Scalar margin;

    bool proven() const { return verdict == Verdict::proven_robust; }
};

/// The alternating 1-D dataset: point 2i with label (-1)^i.
struct Flip {
    Scalar point;
    int label;
};

inline std::vector<Flip> flips(size_t k, Backend b = Backend::rational) {
    if (k < 1)
        throw PreconditionError("need at least one flip");
    std::vector<Flip> out;
    out.reserve(k);
    for (size_t i = 1; i <= k; ++i)
        out.push_back({Scalar::from_int(2 * static_cast<long>(i), b), i % 2 == 0 ? 1 : -1});
    return out;
}

struct FlipTask {
    size_t count;
    Scalar alpha;

    FlipTask(size_t k, Scalar a) : count(k), alpha(std::move(a)) {
        if (count < 1)
            throw PreconditionError("need at least one flip");
        if (alpha.sign() <= 0 || Scalar::one(alpha.backend()) < alpha)
            throw PreconditionError("flip radius must lie in (0, 1]");
    }
};

/// Decision threshold for float-backend margins. Rational margins compare
/// against exact zero; float margins must clear this tolerance, so
/// borderline float results count as not proven.
inline constexpr double kFloatMarginTolerance = 1e-9;

namespace detail {

inline bool margin_proves(const Scalar& margin, double float_tol) {
    if (margin.backend() == Backend::rational)
        return margin.sign() > 0;
    return margin.flt() > float_tol;
}

} // namespace detail

/// Interval certification of the sign of a scalar-output network on the
/// radius-eps ball around x. Sound but incomplete: a not_proven verdict
/// carries no claim about true robustness.
inline CertResult certify_point(const NetPtr& f, const Point& x, const Scalar& eps,
                                int label, double float_tol = kFloatMarginTolerance) {
    if (f->out_dim() != 1)
        throw DimensionError("certification needs a scalar-output network");
    if (label != 1 && label != -1)
        throw PreconditionError("label must be +1 or -1");
    if (eps.sign() < 0)
        throw PreconditionError("negative radius");
    Box out = analyze(f, Box::ball(x, eps));
    Scalar margin = label == 1 ? out.lower(0) : -out.upper(0);
    Verdict v = detail::margin_proves(margin, float_tol) ? Verdict::proven_robust
                                                         : Verdict::not_proven;
    return {v, std::move(out), std::move(margin)};
}

/// Sampling check of concrete robustness on a uniform grid over the ball
/// (endpoints included). One-sided: a true result is necessary but not
/// sufficient for robustness between grid points.
inline bool concrete_robust(const NetPtr& f, const Point& x, const Scalar& eps,
                            int label, size_t grid) {
    if (f->out_dim() != 1)
        throw DimensionError("robustness check needs a scalar-output network");
    if (grid < 2)
        throw PreconditionError("grid must have at least two points");
    if (eps.sign() < 0)
        throw PreconditionError("negative radius");
    Backend b = point_backend(x);
    Scalar lbl = Scalar::from_int(label, b);
    if (eps.sign() == 0)
        return (lbl * eval(f, x)[0]).sign() > 0;

    Scalar steps = Scalar::from_int(static_cast<long>(grid) - 1, b);
    std::vector<size_t> idx(x.size(), 0);
    while (true) {
        Point p;
        p.reserve(x.size());
        for (size_t d = 0; d < x.size(); ++d) {
            Scalar t = Scalar::from_int(static_cast<long>(idx[d]), b);
            p.push_back(x[d] - eps + (t / steps) * (eps + eps));
        }
        if ((lbl * eval(f, p)[0]).sign() <= 0)
            return false;
        size_t d = 0;
        while (d < x.size() && ++idx[d] == grid) {
            idx[d] = 0;
            ++d;
        }
        if (d == x.size())
            return true;
    }
}

struct ClassifierCheck {
    bool ok;
    std::optional<size_t> failing_index; // 1-based flip index
};

/// Does the interval transformer make f an alpha-classifier for k flips?
/// Requires the exact fit f(x_i) = l_i and a proven certification at radius
/// alpha for every flip. Zero output has no sign and fails either label.
inline ClassifierCheck is_provable_alpha_classifier(const NetPtr& f, const FlipTask& task,
                                                    double float_tol = kFloatMarginTolerance) {
    if (f->in_dim() != 1 || f->out_dim() != 1)
        throw DimensionError("flip classification needs a scalar network");
    Backend b = task.alpha.backend();
    std::vector<Flip> data = flips(task.count, b);
    for (size_t i = 0; i < data.size(); ++i) {
        Scalar value = eval(f, {data[i].point})[0];
        if (value != Scalar::from_int(data[i].label, b))
            return {false, i + 1};
        if (!certify_point(f, {data[i].point}, task.alpha, data[i].label, float_tol).proven())
            return {false, i + 1};
    }
    return {true, std::nullopt};
}

/// Loose fit gate for float-trained networks: |f(x_i) - l_i| <= tol at
/// every flip. Reported separately from the exact-fit check so trained
/// networks can participate in experiments without diluting the exact one.
inline bool is_approx_flip_classifier(const NetPtr& f, size_t k, double tol = 1e-6) {
    for (const Flip& fl : flips(k, Backend::binary64)) {
        double v = eval(f, {fl.point})[0].to_double();
        double err = v - static_cast<double>(fl.label);
        if (err < -tol || err > tol)
            return false;
    }
    return true;
}

struct LadderResult {
    Scalar half_gap;                  // half the minimum pairwise distance
    std::optional<Scalar> certified;  // largest ladder radius certified for all points
    size_t rungs_passed;
    size_t steps;
};

/// Probe complete nu-provability from below along the geometric ladder
/// eps_t = nu * delta * (1 - 2^-t), delta = half the minimum pairwise l_inf
/// distance. Certification is monotone in the radius, so the largest
/// all-points-certified rung bounds everything beneath it.
inline LadderResult complete_provable_ladder(const NetPtr& f,
                                             const std::vector<Point>& points,
                                             const std::vector<int>& labels,
                                             const Scalar& nu, size_t steps,
                                             double float_tol = kFloatMarginTolerance) {
    if (points.size() < 2)
        throw PreconditionError("completeness needs at least two points");
    if (points.size() != labels.size())
        throw DimensionError("one label per point");
    if (steps < 1)
        throw PreconditionError("ladder needs at least one rung");
    for (const Point& p : points)
        if (p.size() != points.front().size())
            throw DimensionError("points of mixed dimension");
    Backend b = nu.backend();

    std::optional<Scalar> min_dist;
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j) {
            Scalar d = Scalar::zero(b);
            for (size_t c = 0; c < points[i].size(); ++c)
                d = max(d, abs(points[i][c] - points[j][c]));
            if (d.sign() == 0)
                throw PreconditionError("duplicate points");
            if (!min_dist || d < *min_dist)
                min_dist = d;
        }
    Scalar half_gap = *min_dist / Scalar::from_int(2, b);

    LadderResult result{half_gap, std::nullopt, 0, steps};
    Scalar pow = Scalar::one(b);
    Scalar two = Scalar::from_int(2, b);
    for (size_t t = 1; t <= steps; ++t) {
        pow = pow / two; // 2^-t
        Scalar eps = nu * half_gap * (Scalar::one(b) - pow);
        bool all = true;
        for (size_t i = 0; i < points.size() && all; ++i)
            all = certify_point(f, points[i], eps, labels[i], float_tol).proven();
        if (!all)
            break;
        result.certified = eps;
        result.rungs_passed = t;
    }
    return result;
}

} // namespace ibpcert
