// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ibpcert/analyze.hpp"
#include "ibpcert/certify.hpp"
#include "ibpcert/net.hpp"
#include "ibpcert/witness.hpp"

namespace ibpcert::io {

using nlohmann::json;

// Scalars cross the wire as "p/q" strings (rational backend, "p" when the
// denominator is 1) or plain JSON numbers (binary64).

inline json scalar_to_json(const Scalar& s) {
    if (s.is_rational())
        return s.str();
    return s.flt();
}

inline Scalar scalar_from_json(const json& j, Backend b) {
    if (j.is_string())
        return Scalar::parse(j.get<std::string>(), b);
    if (j.is_number())
        return Scalar::real(j.get<double>()).to_backend(b);
    throw ParseError("expected a scalar, got: " + j.dump());
}

inline json point_to_json(const Point& p) {
    json out = json::array();
    for (const Scalar& s : p)
        out.push_back(scalar_to_json(s));
    return out;
}

inline Point point_from_json(const json& j, Backend b) {
    if (!j.is_array() || j.empty())
        throw ParseError("expected a non-empty coordinate array");
    Point p;
    for (const json& v : j)
        p.push_back(scalar_from_json(v, b));
    return p;
}

inline json box_to_json(const Box& box) {
    return json{{"lower", point_to_json(box.lower())},
                {"upper", point_to_json(box.upper())}};
}

inline Box box_from_json(const json& j, Backend b) {
    if (!j.is_object() || !j.contains("lower") || !j.contains("upper"))
        throw ParseError("expected a box object with lower/upper");
    return Box(point_from_json(j.at("lower"), b), point_from_json(j.at("upper"), b));
}

inline json net_to_json(const NetPtr& f) {
    json out{{"kind", node_kind_name(f->kind())}};
    switch (f->kind()) {
    case NodeKind::sequential:
    case NodeKind::parallel:
        out["children"] = json::array({net_to_json(f->first()), net_to_json(f->second())});
        break;
    case NodeKind::duplicate:
        out["dim"] = f->in_dim();
        break;
    case NodeKind::constant:
    case NodeKind::scale:
        out["kappa"] = scalar_to_json(f->kappa());
        break;
    case NodeKind::relu:
    case NodeKind::add:
        break;
    }
    return out;
}

inline NetPtr net_from_node_json(const json& j, Backend b) {
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError("expected a network node object");
    std::string kind = j.at("kind").get<std::string>();
    auto child = [&](size_t i) -> NetPtr {
        if (!j.contains("children") || !j.at("children").is_array()
            || j.at("children").size() != 2)
            throw ParseError("node '" + kind + "' needs exactly two children");
        return net_from_node_json(j.at("children").at(i), b);
    };
    if (kind == "sequential")
        return Net::sequential(child(0), child(1));
    if (kind == "parallel")
        return Net::parallel(child(0), child(1));
    if (kind == "duplicate")
        return Net::duplicate(j.at("dim").get<size_t>());
    if (kind == "const")
        return Net::constant(scalar_from_json(j.at("kappa"), b));
    if (kind == "scale")
        return Net::scale(scalar_from_json(j.at("kappa"), b));
    if (kind == "relu")
        return Net::relu();
    if (kind == "add")
        return Net::add();
    throw ParseError("unknown node kind: " + kind);
}

inline NetPtr net_from_layered_json(const json& j, Backend b) {
    std::vector<DenseLayer> layers;
    for (const json& lj : j.at("layers")) {
        DenseLayer layer;
        for (const json& row : lj.at("W")) {
            std::vector<Scalar> r;
            for (const json& v : row)
                r.push_back(scalar_from_json(v, b));
            layer.weights.push_back(std::move(r));
        }
        for (const json& v : lj.at("b"))
            layer.bias.push_back(scalar_from_json(v, b));
        std::string act = lj.value("activation", "relu");
        if (act != "relu" && act != "none")
            throw ParseError("unknown activation: " + act);
        layer.relu_activated = act == "relu";
        layers.push_back(std::move(layer));
    }
    return compile_layered(layers);
}

/// Accepts both the nested node format and the convenience layered format.
inline NetPtr net_from_json(const json& j, Backend b) {
    if (j.is_object() && j.contains("layers"))
        return net_from_layered_json(j, b);
    return net_from_node_json(j, b);
}

inline NetPtr load_net_file(const std::string& path, Backend b) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open network file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad JSON in " + path + ": " + e.what());
    }
    return net_from_json(j, b);
}

inline json cert_to_json(const CertResult& r) {
    return json{{"verdict", r.proven() ? "proven_robust" : "not_proven"},
                {"output", box_to_json(r.output)},
                {"margin", scalar_to_json(r.margin)}};
}

/// Per-point certification report; one row per point.
inline std::string cert_report_csv(
    const std::vector<std::tuple<size_t, Scalar, CertResult>>& rows) {
    std::ostringstream out;
    out << "index,eps,verdict,out_lower,out_upper,margin\n";
    for (const auto& [index, eps, r] : rows)
        out << index << ',' << eps.str() << ','
            << (r.proven() ? "proven_robust" : "not_proven") << ','
            << r.output.lower(0).str() << ',' << r.output.upper(0).str() << ','
            << r.margin.str() << '\n';
    return out.str();
}

inline std::string join_coords(const Point& p) {
    std::string out;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i)
            out += ' ';
        out += p[i].str();
    }
    return out;
}

inline json trace_to_json(const IbpTrace& trace) {
    json entries = json::array();
    for (const TraceEntry& e : trace.entries)
        entries.push_back(json{{"path", e.path},
                               {"kind", node_kind_name(e.kind)},
                               {"input", box_to_json(e.input)},
                               {"output", box_to_json(e.output)}});
    return json{{"entries", entries}};
}

/// One row per node: path plus the output box bounds (coordinates
/// space-joined within a field).
inline std::string trace_to_csv(const IbpTrace& trace) {
    std::ostringstream out;
    out << "path,lower,upper\n";
    for (const TraceEntry& e : trace.entries)
        out << e.path << ',' << join_coords(e.output.lower()) << ','
            << join_coords(e.output.upper()) << '\n';
    return out.str();
}

/// Witness serialization; both validity checks are recomputed from scratch
/// and emitted alongside the certificate.
inline json witness_to_json(const NetPtr& f, const Witness& w, const PointSet& preimage) {
    json derivation = json::array();
    for (const DerivationStep& s : w.derivation)
        derivation.push_back(json{{"path", s.path}, {"case", s.rule}, {"box", box_to_json(s.box)}});
    bool sub_ok = is_relative_subset(w.box, preimage.hull());
    bool target_ok = analyze(f, w.box).contains(w.target);
    return json{{"box", box_to_json(w.box)},
                {"target", point_to_json(w.target)},
                {"derivation", derivation},
                {"checked", json{{"relative_subset", sub_ok}, {"target_in_output", target_ok}}}};
}

// Plain-text point/box parsing used by the command line: coordinates are
// comma-separated, points of a set semicolon-separated.

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline Point parse_point(const std::string& text, Backend b) {
    Point p;
    for (const std::string& c : split(text, ','))
        p.push_back(Scalar::parse(c, b));
    return p;
}

/// "l,u" per dimension, dimensions separated by ';'.
inline Box parse_box(const std::string& text, Backend b) {
    std::vector<Scalar> lo, hi;
    for (const std::string& dim : split(text, ';')) {
        auto parts = split(dim, ',');
        if (parts.size() != 2)
            throw ParseError("box dimension needs 'lower,upper': " + dim);
        lo.push_back(Scalar::parse(parts[0], b));
        hi.push_back(Scalar::parse(parts[1], b));
    }
    return Box(std::move(lo), std::move(hi));
}

/// Scalar points "p1,p2,..." or multi-dimensional "x,y;x,y;...".
inline PointSet parse_point_set(const std::string& text, Backend b) {
    std::vector<Point> pts;
    if (text.find(';') != std::string::npos) {
        for (const std::string& p : split(text, ';'))
            pts.push_back(parse_point(p, b));
    } else {
        for (const std::string& c : split(text, ','))
            pts.push_back({Scalar::parse(c, b)});
    }
    size_t dim = pts.front().size();
    return PointSet(dim, std::move(pts));
}

} // namespace ibpcert::io
