// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ibpcert/analyze.hpp"
#include "ibpcert/box.hpp"
#include "ibpcert/net.hpp"
#include "ibpcert/pwl.hpp"

namespace ibpcert {

/// One constructive step of a witness or inversion derivation: which node,
/// which case rule fired, and the box it produced. Steps appear in
/// construction order (children before their parent), so replaying them
/// through the case rules reproduces every box.
struct DerivationStep {
    std::string path;
    std::string rule;
    Box box;
};

/// A machine-checkable certificate of interval imprecision: a box strictly
/// inside the hull of a non-injectivity set whose interval output still
/// contains the target value.
struct Witness {
    Box box;
    Point target;
    std::vector<DerivationStep> derivation;
};

/// Pointwise image of a finite set; exact and finite, which is why compact
/// sets are represented by point sets throughout.
inline PointSet image(const NetPtr& f, const PointSet& xs) {
    std::vector<Point> out;
    out.reserve(xs.size());
    for (const Point& p : xs.points())
        out.push_back(eval(f, p));
    return PointSet(f->out_dim(), std::move(out));
}

namespace detail {

inline void record(std::vector<DerivationStep>* steps, const std::string& path,
                   const char* rule, const Box& box) {
    if (steps)
        steps->push_back({path, rule, box});
}

inline Box invert_rec(const NetPtr& f, const PointSet& domain, const Box& target,
                      std::vector<DerivationStep>* steps, const std::string& path) {
    switch (f->kind()) {
    case NodeKind::sequential: {
        PointSet mid = image(f->second(), domain);
        Box pulled = invert_rec(f->first(), mid, target, steps, child_path(path, 0));
        Box out = invert_rec(f->second(), domain, pulled, steps, child_path(path, 1));
        record(steps, path, "invert:sequential", out);
        return out;
    }
    case NodeKind::duplicate: {
        size_t n = f->in_dim();
        Box left = target.project_block(0, n);
        Box right = target.project_block(n, n);
        std::vector<Scalar> lo, hi;
        for (size_t i = 0; i < n; ++i) {
            lo.push_back(min(left.lower(i), right.lower(i)));
            hi.push_back(max(left.upper(i), right.upper(i)));
        }
        Box out(std::move(lo), std::move(hi)); // hull of the two restrictions
        record(steps, path, "invert:duplicate", out);
        return out;
    }
    case NodeKind::parallel: {
        size_t in_split = f->first()->in_dim();
        size_t out_split = f->first()->out_dim();
        Box left = invert_rec(f->first(), domain.project_block(0, in_split),
                              target.project_block(0, out_split), steps, child_path(path, 0));
        Box right = invert_rec(f->second(), domain.project_block(in_split, f->second()->in_dim()),
                               target.project_block(out_split, f->second()->out_dim()), steps,
                               child_path(path, 1));
        Box out = product(left, right);
        record(steps, path, "invert:parallel", out);
        return out;
    }
    case NodeKind::constant: {
        Box out = Box::degenerate(domain.hull().center());
        record(steps, path, "invert:const", out);
        return out;
    }
    case NodeKind::scale: {
        const Scalar& k = f->kappa();
        Scalar center = target.center(0) / k;
        Scalar radius = target.radius(0) / abs(k);
        Box out = Box::interval(center - radius, center + radius);
        record(steps, path, "invert:scale", out);
        return out;
    }
    case NodeKind::relu: {
        Box dom_hull = domain.hull();
        if (dom_hull.upper(0).sign() > 0) {
            // image hull is [relu(lo), up] with up > 0; the target already
            // sits strictly inside it, so it pulls back to itself
            record(steps, path, "invert:relu-pos", target);
            return target;
        }
        Box out = Box::degenerate({dom_hull.center(0)}); // everything maps to zero
        record(steps, path, "invert:relu-nonpos", out);
        return out;
    }
    case NodeKind::add: {
        Box image_hull = image(f, domain).hull();
        if (image_hull.is_degenerate(0)) {
            // all sums agree, and the hull center keeps that sum
            Box out = Box::degenerate(domain.hull().center());
            record(steps, path, "invert:add-degenerate", out);
            return out;
        }
        Box dom_hull = domain.hull();
        Scalar a = dom_hull.center(0), ra = dom_hull.radius(0);
        Scalar b = dom_hull.center(1), rb = dom_hull.radius(1);
        Scalar y = target.center(0), ry = target.radius(0);
        Scalar shift = (y - a - b) / (ra + rb);
        Scalar x1 = a + ra * shift, r1 = ry * ra / (ra + rb);
        Scalar x2 = b + rb * shift, r2 = ry * rb / (ra + rb);
        Box out = product(Box::interval(x1 - r1, x1 + r1), Box::interval(x2 - r2, x2 + r2));
        record(steps, path, "invert:add-split", out);
        return out;
    }
    }
    throw InternalCheckError("unreachable node kind");
}

inline Box witness_rec(const NetPtr& f, const Point& value, const PointSet& preimage,
                       std::vector<DerivationStep>* steps, const std::string& path) {
    switch (f->kind()) {
    case NodeKind::sequential: {
        PointSet mid = image(f->second(), preimage);
        Box inner_target = witness_rec(f->first(), value, mid, steps, child_path(path, 0));
        Box out = invert_rec(f->second(), preimage, inner_target, steps, child_path(path, 1));
        record(steps, path, "witness:sequential", out);
        return out;
    }
    case NodeKind::duplicate: {
        if (preimage.size() != 1)
            throw InternalCheckError("duplicate preimage must be a single point");
        Box out = preimage.hull();
        record(steps, path, "witness:duplicate", out);
        return out;
    }
    case NodeKind::parallel: {
        size_t in_split = f->first()->in_dim();
        size_t out_split = f->first()->out_dim();
        Point left_value(value.begin(), value.begin() + out_split);
        Point right_value(value.begin() + out_split, value.end());
        Box left = witness_rec(f->first(), left_value, preimage.project_block(0, in_split),
                               steps, child_path(path, 0));
        Box right = witness_rec(f->second(), right_value,
                                preimage.project_block(in_split, f->second()->in_dim()),
                                steps, child_path(path, 1));
        Box out = product(left, right);
        record(steps, path, "witness:parallel", out);
        return out;
    }
    case NodeKind::constant: {
        Box out = Box::degenerate(preimage.hull().center());
        record(steps, path, "witness:const", out);
        return out;
    }
    case NodeKind::scale: {
        Box out = preimage.hull(); // the single point value / kappa
        record(steps, path, "witness:scale", out);
        return out;
    }
    case NodeKind::relu: {
        if (value[0].sign() > 0) {
            Box out = preimage.hull(); // the single positive preimage point
            record(steps, path, "witness:relu-pos", out);
            return out;
        }
        Box out = Box::degenerate(preimage.hull().center());
        record(steps, path, "witness:relu-zero", out);
        return out;
    }
    case NodeKind::add: {
        // every preimage point sums to the value, and so does the hull center
        Box out = Box::degenerate(preimage.hull().center());
        record(steps, path, "witness:add", out);
        return out;
    }
    }
    throw InternalCheckError("unreachable node kind");
}

} // namespace detail

/// Relative inversion: given a finite domain X and a box Y strictly inside
/// the hull of f(X), produce a box X' strictly inside the hull of X whose
/// interval image covers Y. Both postconditions are re-checked before
/// returning; a failure there is a library bug, not bad input.
inline Box invert_relative(const NetPtr& f, const PointSet& domain, const Box& target,
                           std::vector<DerivationStep>* steps = nullptr) {
    if (domain.dim() != f->in_dim() || target.dim() != f->out_dim())
        throw DimensionError("inversion arity mismatch");
    if (!is_relative_subset(target, image(f, domain).hull()))
        throw PreconditionError(
            "target box is not a relative subset of the image hull");
    Box out = detail::invert_rec(f, domain, target, steps, "");
    if (!is_relative_subset(out, domain.hull()))
        throw InternalCheckError("inverted box escapes the domain hull");
    if (!analyze(f, out).contains_box(target))
        throw InternalCheckError("inverted box fails to cover the target");
    return out;
}

/// Imprecision witness: for a value x and a finite set N of points that f
/// maps exactly to x, produce a box strictly inside hull(N) whose interval
/// output still contains x. Both postconditions are re-checked.
inline Witness imprecision_witness(const NetPtr& f, const Point& value,
                                   const PointSet& preimage) {
    if (preimage.dim() != f->in_dim() || value.size() != f->out_dim())
        throw DimensionError("witness arity mismatch");
    for (const Point& p : preimage.points())
        if (eval(f, p) != value)
            throw PreconditionError("preimage set contains a point not mapping to the value");
    std::vector<DerivationStep> steps;
    Box box = detail::witness_rec(f, value, preimage, &steps, "");
    if (!is_relative_subset(box, preimage.hull()))
        throw InternalCheckError("witness box escapes the preimage hull");
    if (!analyze(f, box).contains(value))
        throw InternalCheckError("witness box output misses the target value");
    return Witness{std::move(box), value, std::move(steps)};
}

/// Result of the three-point impossibility demonstration: the exact zero
/// crossings around the middle point and the witness interval strictly
/// between them whose interval output contains zero.
struct ThreePointDemo {
    Scalar crossing_left;  // zero of f in (-2, 0), the one nearest 0
    Scalar crossing_right; // zero of f in (0, 2), the one nearest 0
    Witness witness;
    bool relative_subset_ok;
    bool target_in_output_ok;
};

/// For any network fitting the signs of {(-2,-1), (0,1), (2,-1)}: isolate
/// the zero crossings exactly with piecewise-linear arithmetic, then run
/// the witness construction on them. The returned interval defeats
/// complete 1-provability of the fit.
inline ThreePointDemo three_point_demo(const NetPtr& f) {
    if (f->in_dim() != 1 || f->out_dim() != 1)
        throw DimensionError("demonstration needs a scalar network");
    auto at = [&](long v) { return eval_scalar(f, Scalar::rational(v)); };
    if (!(at(-2).sign() < 0 && at(0).sign() > 0 && at(2).sign() < 0))
        throw PreconditionError("network does not fit the three-point dataset");

    PwlFunction graph = scalar_pwl(f);
    auto left_zeros = graph.zeros_in(Scalar::rational(-2), Scalar::rational(0));
    auto right_zeros = graph.zeros_in(Scalar::rational(0), Scalar::rational(2));
    if (left_zeros.empty() || right_zeros.empty())
        throw InternalCheckError("sign change without a zero crossing");
    Scalar z_left = left_zeros.back().second;  // nearest zero left of 0
    Scalar z_right = right_zeros.front().first; // nearest zero right of 0

    Witness w = imprecision_witness(f, {Scalar::rational(0)},
                                    PointSet(1, {{z_left}, {z_right}}));
    Box hull = Box::interval(z_left, z_right);
    bool sub_ok = is_relative_subset(w.box, hull);
    bool target_ok = analyze(f, w.box).contains(w.target);
    return {std::move(z_left), std::move(z_right), std::move(w), sub_ok, target_ok};
}

} // namespace ibpcert
