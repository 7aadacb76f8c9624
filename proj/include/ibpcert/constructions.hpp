// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ibpcert/net.hpp"

namespace ibpcert {

/// An always-robust (but not necessarily interval-provable) one-hidden-layer
/// fit of labeled points on the line, as both the flat parameter form and
/// the compiled network.
struct RobustClassifier {
    SingleLayerNet layer; // 3 neurons per data point
    NetPtr net;
    Scalar gap; // smallest pairwise distance between the points
};

/// Explicit hat-function classifier: for each point x_i with label l_i the
/// hidden layer contributes
///   l_i * ( relu((y - (x_i - g))/g) - relu(2(y - x_i)/g) + relu((y - (x_i + g))/g) )
/// with g the minimum pairwise gap. Evaluates to exactly l_i at every x_i
/// and keeps the sign of l_i on a neighborhood of radius g around it.
/// Note the gap here is the full minimum distance, twice the half-distance
/// used by the completeness ladder.
inline RobustClassifier build_robust_classifier(const std::vector<Scalar>& points,
                                                const std::vector<int>& labels) {
    if (points.size() < 2)
        throw PreconditionError("need at least two points");
    if (points.size() != labels.size())
        throw DimensionError("one label per point");
    for (int l : labels)
        if (l != 1 && l != -1)
            throw PreconditionError("labels must be +1 or -1");
    Backend b = points.front().backend();
    Scalar gap = abs(points[0] - points[1]);
    for (size_t i = 0; i < points.size(); ++i)
        for (size_t j = i + 1; j < points.size(); ++j) {
            Scalar d = abs(points[i] - points[j]);
            if (d.sign() == 0)
                throw PreconditionError("duplicate points");
            if (d < gap)
                gap = d;
        }

    Scalar one = Scalar::one(b), two = Scalar::from_int(2, b);
    SingleLayerNet s;
    s.post_bias = Scalar::zero(b);
    for (size_t i = 0; i < points.size(); ++i) {
        Scalar label = Scalar::from_int(labels[i], b);
        // relu((y - (x_i - g))/g), weight +l_i
        s.pre_weights.push_back(one / gap);
        s.pre_bias.push_back(-(points[i] - gap) / gap);
        s.post_weights.push_back(label);
        // relu(2(y - x_i)/g), weight -l_i
        s.pre_weights.push_back(two / gap);
        s.pre_bias.push_back(-(two * points[i]) / gap);
        s.post_weights.push_back(-label);
        // relu((y - (x_i + g))/g), weight +l_i
        s.pre_weights.push_back(one / gap);
        s.pre_bias.push_back(-(points[i] + gap) / gap);
        s.post_weights.push_back(label);
    }
    RobustClassifier out{s, compile_single_layer(s), gap};
    return out;
}

/// The fixed 2-2-2-1 demonstration network: robust around 0 and +-2 but not
/// interval-provably so. Every hidden stage is ReLU-activated; the final
/// read-out is the linear difference of the last two units.
inline NetPtr build_demo_network(Backend b = Backend::rational) {
    auto sc = [&](long v) { return Scalar::from_int(v, b); };
    NetPtr layer1 = compile_affine({{sc(1)}, {sc(-1)}}, {sc(0), sc(0)});
    NetPtr layer2 = compile_affine({{sc(-1), sc(-1)}, {sc(1), sc(1)}}, {sc(2), sc(-2)});
    NetPtr layer3 = compile_affine({{sc(1), sc(0)}, {sc(0), sc(-1)}}, {sc(0), sc(1)});
    NetPtr readout = compile_affine({{sc(1), sc(-1)}}, {sc(0)});
    NetPtr net = Net::sequential(relu_net(2), std::move(layer1));
    net = Net::sequential(relu_net(2), Net::sequential(std::move(layer2), std::move(net)));
    net = Net::sequential(relu_net(2), Net::sequential(std::move(layer3), std::move(net)));
    return Net::sequential(std::move(readout), std::move(net));
}

} // namespace ibpcert
