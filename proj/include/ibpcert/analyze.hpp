// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ibpcert/box.hpp"
#include "ibpcert/net.hpp"

namespace ibpcert {

/// One interval-propagation step: the box entering and leaving a node.
/// Node paths are root-to-leaf child indices ("" is the root, "0.1" the
/// second child of the first child), so equal runs emit identical traces.
struct TraceEntry {
    std::string path;
    NodeKind kind;
    Box input;
    Box output;
};

struct IbpTrace {
    std::vector<TraceEntry> entries;
};

namespace detail {

inline std::string child_path(const std::string& prefix, int index) {
    if (prefix.empty())
        return std::to_string(index);
    return prefix + "." + std::to_string(index);
}

inline Box analyze_rec(const NetPtr& f, const Box& input, IbpTrace* trace,
                       const std::string& path) {
    Box out = [&]() -> Box {
        switch (f->kind()) {
        case NodeKind::sequential: {
            Box mid = analyze_rec(f->second(), input, trace, child_path(path, 1));
            return analyze_rec(f->first(), mid, trace, child_path(path, 0));
        }
        case NodeKind::duplicate:
            return product(input, input);
        case NodeKind::parallel: {
            Box left = analyze_rec(f->first(), input.project_block(0, f->first()->in_dim()),
                                   trace, child_path(path, 0));
            Box right = analyze_rec(
                f->second(), input.project_block(f->first()->in_dim(), f->second()->in_dim()),
                trace, child_path(path, 1));
            return product(left, right);
        }
        case NodeKind::constant:
            return box_const(f->kappa());
        case NodeKind::scale:
            return box_scale(f->kappa(), input);
        case NodeKind::relu:
            return box_relu(input);
        case NodeKind::add:
            return box_add(input.project(0), input.project(1));
        }
        throw InternalCheckError("unreachable node kind");
    }();
    if (trace)
        trace->entries.push_back({path, f->kind(), input, out});
    return out;
}

} // namespace detail

/// The interval transformation f#: propagate a box through the network by
/// replacing every node with its exact interval counterpart. Sound
/// over-approximation of eval; exact on degenerate boxes.
inline Box analyze(const NetPtr& f, const Box& input) {
    if (input.dim() != f->in_dim())
        throw DimensionError("analyze input of dimension " + std::to_string(input.dim())
                             + ", expected " + std::to_string(f->in_dim()));
    return detail::analyze_rec(f, input, nullptr, "");
}

/// As analyze, plus the full per-node trace in evaluation order (children
/// before parents; the root entry is last).
inline std::pair<Box, IbpTrace> analyze_traced(const NetPtr& f, const Box& input) {
    if (input.dim() != f->in_dim())
        throw DimensionError("analyze input of dimension " + std::to_string(input.dim())
                             + ", expected " + std::to_string(f->in_dim()));
    IbpTrace trace;
    Box out = detail::analyze_rec(f, input, &trace, "");
    return {std::move(out), std::move(trace)};
}

} // namespace ibpcert
