// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ibpcert/box.hpp"
#include "ibpcert/certify.hpp"
#include "ibpcert/net.hpp"

namespace ibpcert {

/// Neuron orientation filters for the imprecision-contribution sums.
/// Boundary neurons belong to both classes: a zero pre-activation slope is
/// both left and right, a zero output weight both non-negative and
/// non-positive. Such neurons contribute zero weight, so summing the left
/// and right classes by hand still agrees with querying everything at once.
enum class SlopeDir { left, right, any };      // pre-activation slope <= 0 / >= 0 / all
enum class OutSign { plus, minus, any };       // output weight >= 0 / <= 0 / all

struct ContributionQuery {
    SlopeDir dir;
    OutSign sign;
};

namespace detail {

inline bool neuron_selected(const SingleLayerNet& s, size_t i, const Scalar& x,
                            const ContributionQuery& q) {
    if ((s.pre_weights[i] * x + s.pre_bias[i]).sign() < 0)
        return false; // inactive at x
    int slope = s.pre_weights[i].sign();
    if (q.dir == SlopeDir::left && slope > 0)
        return false;
    if (q.dir == SlopeDir::right && slope < 0)
        return false;
    int out = s.post_weights[i].sign();
    if (q.sign == OutSign::plus && out < 0)
        return false;
    if (q.sign == OutSign::minus && out > 0)
        return false;
    return true;
}

} // namespace detail

/// Sum of |post_w_i * pre_w_i| over the selected active neurons: the
/// magnitude of interval imprecision a point can pick up from them.
inline Scalar contribution_abs(const SingleLayerNet& s, const Scalar& x,
                               const ContributionQuery& q) {
    s.validate();
    Scalar acc = Scalar::zero(x.backend());
    for (size_t i = 0; i < s.width(); ++i)
        if (detail::neuron_selected(s, i, x, q))
            acc = acc + abs(s.post_weights[i] * s.pre_weights[i]);
    return acc;
}

/// Signed variant: sum of post_w_i * pre_w_i over the selected active
/// neurons. Queried over everything it equals the slope of the network
/// wherever the derivative exists.
inline Scalar contribution_signed(const SingleLayerNet& s, const Scalar& x,
                                  const ContributionQuery& q) {
    s.validate();
    Scalar acc = Scalar::zero(x.backend());
    for (size_t i = 0; i < s.width(); ++i)
        if (detail::neuron_selected(s, i, x, q))
            acc = acc + s.post_weights[i] * s.pre_weights[i];
    return acc;
}

/// Closed-form interval propagation through a single-layer network on the
/// ball [x - alpha, x + alpha]:
///   v_minus = relu(pre_w x + pre_b - |pre_w| alpha)
///   v_plus  = relu(pre_w x + pre_b + |pre_w| alpha)
/// output center = post_w (v_plus + v_minus)/2 + post_b,
/// output radius = |post_w| (v_plus - v_minus)/2.
/// Agrees exactly with analyze on the compiled network.
inline Box ibp_closed_form(const SingleLayerNet& s, const Scalar& x, const Scalar& alpha) {
    s.validate();
    if (alpha.sign() < 0)
        throw PreconditionError("negative radius");
    Backend b = x.backend();
    Scalar center = s.post_bias, radius = Scalar::zero(b);
    Scalar two = Scalar::from_int(2, b);
    for (size_t i = 0; i < s.width(); ++i) {
        Scalar pre = s.pre_weights[i] * x + s.pre_bias[i];
        Scalar spread = abs(s.pre_weights[i]) * alpha;
        Scalar v_minus = relu(pre - spread);
        Scalar v_plus = relu(pre + spread);
        center = center + s.post_weights[i] * (v_plus + v_minus) / two;
        radius = radius + abs(s.post_weights[i]) * (v_plus - v_minus) / two;
    }
    return Box::interval(center - radius, center + radius);
}

/// Exact-fit gate: f(x_i) = l_i at every flip, decided exactly in the
/// network's backend.
inline bool classifies_flips_exactly(const SingleLayerNet& s, size_t k) {
    s.validate();
    Backend b = s.backend();
    for (const Flip& fl : flips(k, b))
        if (s.eval(fl.point) != Scalar::from_int(fl.label, b))
            return false;
    return true;
}

/// Smallest flip count the single-layer limit speaks about at radius alpha:
/// ceil(2/alpha) + 5. Computed in exact rationals whatever the backend.
inline long flip_limit_threshold(const Scalar& alpha) {
    if (alpha.sign() <= 0 || Scalar::one(alpha.backend()) < alpha)
        throw PreconditionError("radius must lie in (0, 1]");
    Scalar exact = alpha.to_backend(Backend::rational);
    return ceil_to_long(Scalar::rational(2) / exact) + 5;
}

struct EndNeuronReport {
    Scalar kappa;          // k - 5
    Scalar left_at_first;  // leftward contribution at the first flip
    Scalar right_at_last;  // rightward contribution at the last flip
    bool holds;            // kappa < max of the two (guaranteed for valid input)
};

/// Checks the end-neuron bound on a concrete exact k-flip classifier:
/// kappa = k - 5 must be strictly below the larger outward contribution at
/// the data's ends. The bound is stated for kappa = k - 5 but the
/// underlying accumulation argument has slack, so typical instances clear
/// it by a margin.
inline EndNeuronReport check_end_neuron_bound(const SingleLayerNet& s, size_t k) {
    if (k < 1)
        throw PreconditionError("need at least one flip");
    if (!classifies_flips_exactly(s, k))
        throw PreconditionError("network is not an exact classifier for these flips");
    Backend b = s.backend();
    std::vector<Flip> data = flips(k, b);
    Scalar kappa = Scalar::from_int(static_cast<long>(k) - 5, b);
    Scalar left = contribution_abs(s, data.front().point, {SlopeDir::left, OutSign::any});
    Scalar right = contribution_abs(s, data.back().point, {SlopeDir::right, OutSign::any});
    bool holds = kappa < max(left, right);
    return {std::move(kappa), std::move(left), std::move(right), holds};
}

/// All flip indices j whose nearby function values are outrun by the
/// accumulated imprecision contribution:
///   l_j a^-1 (f(x_j + a) + f(x_j - a))
///     < A_any(x_j) + A_right(x_j - a) + A_left(x_j + a).
/// Non-empty for every exact classifier of k >= ceil(2/a) + 5 flips; an
/// empty result signals a bug here, not in the input.
inline std::vector<size_t> find_violation_point(const SingleLayerNet& s, size_t k,
                                                const Scalar& step) {
    if (step.sign() <= 0 || Scalar::one(step.backend()) < step)
        throw PreconditionError("step must lie in (0, 1]");
    if (static_cast<long>(k) < flip_limit_threshold(step))
        throw PreconditionError("flip count below the limit threshold");
    if (!classifies_flips_exactly(s, k))
        throw PreconditionError("network is not an exact classifier for these flips");
    Backend b = s.backend();
    std::vector<Flip> data = flips(k, b);
    std::vector<size_t> hits;
    for (size_t j = 1; j <= k; ++j) {
        const Scalar& x = data[j - 1].point;
        Scalar lbl = Scalar::from_int(data[j - 1].label, b);
        Scalar lhs = lbl * (s.eval(x + step) + s.eval(x - step)) / step;
        Scalar rhs = contribution_abs(s, x, {SlopeDir::any, OutSign::any})
                     + contribution_abs(s, x - step, {SlopeDir::right, OutSign::any})
                     + contribution_abs(s, x + step, {SlopeDir::left, OutSign::any});
        if (lhs < rhs)
            hits.push_back(j);
    }
    if (hits.empty())
        throw InternalCheckError("violation point missing; contribution bookkeeping is wrong");
    return hits;
}

struct LimitViolation {
    size_t flip_index; // 1-based j whose certification fails
    Box output;        // closed-form interval output at that flip
    Scalar margin;     // label-signed margin, strictly negative
};

/// Instantiates the single-layer limit: any exact classifier of
/// k >= ceil(2/alpha) + 5 flips has some flip whose interval output
/// strictly straddles zero at radius alpha. Returns the first such flip.
inline LimitViolation verify_limit(const SingleLayerNet& s, size_t k, const Scalar& alpha) {
    if (alpha.sign() <= 0 || Scalar::one(alpha.backend()) < alpha)
        throw PreconditionError("radius must lie in (0, 1]");
    if (static_cast<long>(k) < flip_limit_threshold(alpha))
        throw PreconditionError("flip count below the limit threshold");
    if (!classifies_flips_exactly(s, k))
        throw PreconditionError("network is not an exact classifier for these flips");
    std::vector<Flip> data = flips(k, s.backend());
    for (size_t j = 1; j <= k; ++j) {
        Box out = ibp_closed_form(s, data[j - 1].point, alpha);
        Scalar margin = data[j - 1].label == 1 ? out.lower(0) : -out.upper(0);
        if (margin.sign() < 0)
            return {j, std::move(out), std::move(margin)};
    }
    throw InternalCheckError("no straddling flip found for an exact classifier at the limit threshold");
}

} // namespace ibpcert
