// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ibpcert/numeric.hpp"

namespace ibpcert {

enum class NodeKind { sequential, duplicate, parallel, constant, scale, relu, add };

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::sequential: return "sequential";
    case NodeKind::duplicate: return "duplicate";
    case NodeKind::parallel: return "parallel";
    case NodeKind::constant: return "const";
    case NodeKind::scale: return "scale";
    case NodeKind::relu: return "relu";
    case NodeKind::add: return "add";
    }
    return "?";
}

class Net;
using NetPtr = std::shared_ptr<const Net>;

/// Inductive feed-forward network over ReLU activations. Seven node kinds:
///   sequential f(x) = outer(inner(x))
///   duplicate  f(x) = (x, x)
///   parallel   f(x1, x2) = (first(x1), second(x2))
///   const      f(x) = kappa            (1 -> 1)
///   scale      f(x) = kappa * x        (1 -> 1, kappa != 0)
///   relu       f(x) = max(x, 0)        (1 -> 1)
///   add        f(x1, x2) = x1 + x2     (2 -> 1)
/// Nodes are immutable and shared; evaluation is pure.
class Net {
public:
    static NetPtr sequential(NetPtr outer, NetPtr inner) {
        if (!outer || !inner)
            throw Error("null child in sequential node");
        if (inner->out_dim() != outer->in_dim())
            throw DimensionError("sequential arity mismatch: inner out "
                                 + std::to_string(inner->out_dim()) + " vs outer in "
                                 + std::to_string(outer->in_dim()));
        size_t in = inner->in_dim(), out = outer->out_dim();
        return make(NodeKind::sequential, in, out, Scalar(), std::move(outer),
                    std::move(inner));
    }
    static NetPtr duplicate(size_t dim) {
        if (dim == 0)
            throw DimensionError("duplicate of zero dimensions");
        return make(NodeKind::duplicate, dim, 2 * dim, Scalar(), nullptr, nullptr);
    }
    static NetPtr parallel(NetPtr first, NetPtr second) {
        if (!first || !second)
            throw Error("null child in parallel node");
        size_t in = first->in_dim() + second->in_dim();
        size_t out = first->out_dim() + second->out_dim();
        return make(NodeKind::parallel, in, out, Scalar(), std::move(first),
                    std::move(second));
    }
    static NetPtr constant(Scalar v) {
        return make(NodeKind::constant, 1, 1, std::move(v), nullptr, nullptr);
    }
    static NetPtr scale(Scalar k) {
        if (k.sign() == 0)
            throw PreconditionError("scale weight must be nonzero");
        return make(NodeKind::scale, 1, 1, std::move(k), nullptr, nullptr);
    }
    static NetPtr relu() {
        return make(NodeKind::relu, 1, 1, Scalar(), nullptr, nullptr);
    }
    static NetPtr add() {
        return make(NodeKind::add, 2, 1, Scalar(), nullptr, nullptr);
    }

    NodeKind kind() const { return kind_; }
    size_t in_dim() const { return in_dim_; }
    size_t out_dim() const { return out_dim_; }
    size_t node_count() const { return count_; }

    const Scalar& kappa() const { return kappa_; }

    /// Child 0; the outer function of a sequential node.
    const NetPtr& first() const { return a_; }
    /// Child 1; the inner function of a sequential node.
    const NetPtr& second() const { return b_; }

    bool has_children() const { return a_ != nullptr; }

private:
    static NetPtr make(NodeKind k, size_t in, size_t out, Scalar kappa, NetPtr a,
                       NetPtr b) {
        auto n = std::make_shared<Net>(Private{});
        n->kind_ = k;
        n->in_dim_ = in;
        n->out_dim_ = out;
        n->kappa_ = std::move(kappa);
        n->count_ = 1 + (a ? a->count_ : 0) + (b ? b->count_ : 0);
        n->a_ = std::move(a);
        n->b_ = std::move(b);
        return n;
    }

    struct Private {};

public:
    explicit Net(Private) {}

private:
    NodeKind kind_ = NodeKind::relu;
    size_t in_dim_ = 1, out_dim_ = 1, count_ = 1;
    Scalar kappa_;
    NetPtr a_, b_;
};

/// Concrete evaluation by structural recursion; exact under the rational
/// backend. Constant/scale weights must share the input's backend.
inline Point eval(const NetPtr& f, const Point& x) {
    if (x.size() != f->in_dim())
        throw DimensionError("eval input of dimension " + std::to_string(x.size())
                             + ", expected " + std::to_string(f->in_dim()));
    switch (f->kind()) {
    case NodeKind::sequential:
        return eval(f->first(), eval(f->second(), x));
    case NodeKind::duplicate: {
        Point out = x;
        out.insert(out.end(), x.begin(), x.end());
        return out;
    }
    case NodeKind::parallel: {
        size_t split = f->first()->in_dim();
        Point left(x.begin(), x.begin() + split);
        Point right(x.begin() + split, x.end());
        Point out = eval(f->first(), left);
        Point more = eval(f->second(), right);
        out.insert(out.end(), more.begin(), more.end());
        return out;
    }
    case NodeKind::constant:
        return {f->kappa()};
    case NodeKind::scale:
        return {f->kappa() * x[0]};
    case NodeKind::relu:
        return {relu(x[0])};
    case NodeKind::add:
        return {x[0] + x[1]};
    }
    throw InternalCheckError("unreachable node kind");
}

inline Scalar eval_scalar(const NetPtr& f, const Scalar& x) {
    if (f->in_dim() != 1 || f->out_dim() != 1)
        throw DimensionError("eval_scalar needs a 1 -> 1 network");
    return eval(f, Point{x})[0];
}

/// Deep copy with every constant/scale weight converted to the target
/// backend (exact when widening float to rational).
inline NetPtr convert(const NetPtr& f, Backend b) {
    switch (f->kind()) {
    case NodeKind::sequential:
        return Net::sequential(convert(f->first(), b), convert(f->second(), b));
    case NodeKind::parallel:
        return Net::parallel(convert(f->first(), b), convert(f->second(), b));
    case NodeKind::duplicate:
        return Net::duplicate(f->in_dim());
    case NodeKind::constant:
        return Net::constant(f->kappa().to_backend(b));
    case NodeKind::scale:
        return Net::scale(f->kappa().to_backend(b));
    case NodeKind::relu:
        return Net::relu();
    case NodeKind::add:
        return Net::add();
    }
    throw InternalCheckError("unreachable node kind");
}

/// Identity on dim dimensions, spelled with unit scales.
inline NetPtr identity_net(size_t dim, Backend b = Backend::rational) {
    NetPtr n = Net::scale(Scalar::one(b));
    for (size_t i = 1; i < dim; ++i)
        n = Net::parallel(std::move(n), Net::scale(Scalar::one(b)));
    return n;
}

/// Componentwise ReLU on dim dimensions.
inline NetPtr relu_net(size_t dim) {
    NetPtr n = Net::relu();
    for (size_t i = 1; i < dim; ++i)
        n = Net::parallel(std::move(n), Net::relu());
    return n;
}

namespace detail {

/// m side-by-side copies of an n-dimensional input, by a duplicate tree.
inline NetPtr replicate_net(size_t n, size_t m, Backend b) {
    if (m == 1)
        return identity_net(n, b);
    size_t left = (m + 1) / 2, right = m / 2;
    return Net::sequential(
        Net::parallel(replicate_net(n, left, b), replicate_net(n, right, b)),
        Net::duplicate(n));
}

/// Left-associated sum of n scalars.
inline NetPtr sum_fold_net(size_t n, Backend b) {
    if (n == 1)
        return identity_net(1, b);
    if (n == 2)
        return Net::add();
    return Net::sequential(
        Net::add(),
        Net::parallel(sum_fold_net(n - 1, b), identity_net(1, b)));
}

/// Adds a constant to a scalar: x -> (x, x) -> (x, c) -> x + c.
inline NetPtr add_constant_net(Scalar c, Backend b) {
    return Net::sequential(
        Net::sequential(Net::add(),
                        Net::parallel(identity_net(1, b), Net::constant(std::move(c)))),
        Net::duplicate(1));
}

/// One affine row w . x + c over an n-dimensional input.
inline NetPtr affine_row_net(const std::vector<Scalar>& w, const Scalar& c, Backend b) {
    size_t n = w.size();
    bool all_zero = true;
    for (const Scalar& wi : w)
        if (wi.sign() != 0)
            all_zero = false;
    if (n == 1 && all_zero)
        return Net::constant(c); // canonical zero-row encoding
    NetPtr terms;
    for (size_t i = 0; i < n; ++i) {
        NetPtr t = w[i].sign() == 0 ? Net::constant(Scalar::zero(b)) : Net::scale(w[i]);
        terms = terms ? Net::parallel(std::move(terms), std::move(t)) : std::move(t);
    }
    NetPtr row = n == 1 ? std::move(terms)
                        : Net::sequential(sum_fold_net(n, b), std::move(terms));
    if (c.sign() != 0)
        row = Net::sequential(add_constant_net(c, b), std::move(row));
    return row;
}

} // namespace detail

/// Canonical encoding of x -> Wx + c: a duplicate fan-out tree feeding one
/// row network per output, each row a left-to-right scale/add fold. The
/// canonical shape makes interval results reproducible run to run.
inline NetPtr compile_affine(const std::vector<std::vector<Scalar>>& weights,
                             const std::vector<Scalar>& bias) {
    size_t m = weights.size();
    if (m == 0 || m != bias.size())
        throw DimensionError("affine layer needs one bias per row");
    size_t n = weights.front().size();
    if (n == 0)
        throw DimensionError("affine layer with zero inputs");
    Backend b = bias.front().backend();
    for (const auto& row : weights)
        if (row.size() != n)
            throw DimensionError("ragged weight matrix");
    NetPtr rows;
    for (size_t r = 0; r < m; ++r) {
        NetPtr row = detail::affine_row_net(weights[r], bias[r], b);
        rows = rows ? Net::parallel(std::move(rows), std::move(row)) : std::move(row);
    }
    if (m == 1)
        return rows;
    return Net::sequential(std::move(rows), detail::replicate_net(n, m, b));
}

/// One-hidden-layer scalar network f(x) = post_w . relu(pre_w x + pre_b) + post_b.
struct SingleLayerNet {
    std::vector<Scalar> pre_weights;  // one slope per neuron
    std::vector<Scalar> pre_bias;
    std::vector<Scalar> post_weights;
    Scalar post_bias;

    size_t width() const { return pre_weights.size(); }

    void validate() const {
        if (pre_weights.empty() || pre_bias.size() != width()
            || post_weights.size() != width())
            throw DimensionError("single-layer parameter vectors must share one length");
    }

    Backend backend() const { return post_bias.backend(); }

    /// Direct closed-form evaluation, independent of the compiled NetExpr.
    Scalar eval(const Scalar& x) const {
        Scalar acc = post_bias;
        for (size_t i = 0; i < width(); ++i)
            acc = acc + post_weights[i] * relu(pre_weights[i] * x + pre_bias[i]);
        return acc;
    }
};

/// One dense layer of the convenience layered format.
struct DenseLayer {
    std::vector<std::vector<Scalar>> weights;
    std::vector<Scalar> bias;
    bool relu_activated = true;
};

/// Compile a stack of dense layers (applied first to last) into the
/// inductive representation.
inline NetPtr compile_layered(const std::vector<DenseLayer>& layers) {
    if (layers.empty())
        throw PreconditionError("layered network needs at least one layer");
    NetPtr net;
    for (const DenseLayer& layer : layers) {
        NetPtr stage = compile_affine(layer.weights, layer.bias);
        if (layer.relu_activated) {
            NetPtr act = relu_net(stage->out_dim());
            stage = Net::sequential(std::move(act), std::move(stage));
        }
        net = net ? Net::sequential(std::move(stage), std::move(net)) : std::move(stage);
    }
    return net;
}

/// Compile to the inductive representation: input column, componentwise
/// ReLU, then the output row.
inline NetPtr compile_single_layer(const SingleLayerNet& s) {
    s.validate();
    std::vector<std::vector<Scalar>> in_col;
    for (const Scalar& w : s.pre_weights)
        in_col.push_back({w});
    NetPtr first = compile_affine(in_col, s.pre_bias);
    NetPtr out = compile_affine({s.post_weights}, {s.post_bias});
    return Net::sequential(std::move(out),
                           Net::sequential(relu_net(s.width()), std::move(first)));
}

} // namespace ibpcert
