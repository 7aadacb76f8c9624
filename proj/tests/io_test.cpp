// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "ibpcert/constructions.hpp"
#include "ibpcert/io.hpp"

using namespace ibpcert;
namespace io = ibpcert::io;

namespace {
Scalar q(long num, long den = 1) { return Scalar::rational(num, den); }
} // namespace

TEST_CASE("scalar wire format") {
    CHECK(io::scalar_to_json(q(-3, 4)) == nlohmann::json("-3/4"));
    CHECK(io::scalar_to_json(q(7)) == nlohmann::json("7"));
    CHECK(io::scalar_from_json("3/4", Backend::rational) == q(3, 4));
    CHECK(io::scalar_from_json(0.5, Backend::rational) == q(1, 2));
    CHECK(io::scalar_from_json("0.5", Backend::binary64) == Scalar::real(0.5));
    CHECK_THROWS_AS(io::scalar_from_json(nlohmann::json::array(), Backend::rational),
                    ParseError);
}

TEST_CASE("box wire format round-trips") {
    Box b({q(-1), q(0)}, {q(1, 2), q(3)});
    CHECK(io::box_from_json(io::box_to_json(b), Backend::rational) == b);
    CHECK_THROWS_AS(io::box_from_json(nlohmann::json{{"lower", {0}}}, Backend::rational),
                    ParseError);
    // invalid bounds surface as construction errors
    nlohmann::json bad{{"lower", {"1"}}, {"upper", {"0"}}};
    CHECK_THROWS_AS(io::box_from_json(bad, Backend::rational), Error);
}

TEST_CASE("network wire format round-trips the demonstration network") {
    NetPtr f = build_demo_network();
    NetPtr back = io::net_from_json(io::net_to_json(f), Backend::rational);
    for (long t = -6; t <= 6; ++t)
        CHECK(eval_scalar(back, q(t, 2)) == eval_scalar(f, q(t, 2)));
}

TEST_CASE("layered format compiles through the affine encoder") {
    nlohmann::json j = nlohmann::json::parse(R"({
        "layers": [
            {"W": [["1"], ["-1"]], "b": ["0", "0"], "activation": "relu"},
            {"W": [["1", "1"]], "b": ["-1"], "activation": "none"}
        ]
    })");
    NetPtr f = io::net_from_json(j, Backend::rational);
    // |x| - 1
    CHECK(eval_scalar(f, q(3)) == q(2));
    CHECK(eval_scalar(f, q(-3)) == q(2));
    CHECK(eval_scalar(f, q(0)) == q(-1));
}

TEST_CASE("unknown node kinds are rejected") {
    CHECK_THROWS_AS(io::net_from_json(nlohmann::json{{"kind", "sigmoid"}}, Backend::rational),
                    ParseError);
}

TEST_CASE("trace export") {
    auto [out, trace] = analyze_traced(build_demo_network(), Box::interval(q(-1), q(1)));
    std::string csv = io::trace_to_csv(trace);
    CHECK(csv.rfind("path,lower,upper\n", 0) == 0);
    // last row is the root with the final interval
    CHECK(csv.find("\n,-1,1\n") != std::string::npos);
    CHECK(io::trace_to_csv(trace) == csv); // deterministic

    nlohmann::json j = io::trace_to_json(trace);
    CHECK(j.at("entries").size() == trace.entries.size());
}

TEST_CASE("witness export carries the validity re-check") {
    NetPtr f = build_demo_network();
    PointSet n(1, {{q(-1)}, {q(1)}});
    Witness w = imprecision_witness(f, {q(0)}, n);
    nlohmann::json j = io::witness_to_json(f, w, n);
    CHECK(j.at("checked").at("relative_subset") == true);
    CHECK(j.at("checked").at("target_in_output") == true);
    CHECK(j.at("derivation").size() == w.derivation.size());
}

TEST_CASE("certification report rows") {
    NetPtr f = build_demo_network();
    std::vector<std::tuple<size_t, Scalar, CertResult>> rows;
    rows.emplace_back(1, q(1), certify_point(f, {q(0)}, q(1), 1));
    rows.emplace_back(2, q(0), certify_point(f, {q(0)}, q(0), 1));
    std::string csv = io::cert_report_csv(rows);
    CHECK(csv == "index,eps,verdict,out_lower,out_upper,margin\n"
                 "1,1,not_proven,-1,1,-1\n"
                 "2,0,proven_robust,1,1,1\n");
}

TEST_CASE("plain-text argument parsing") {
    CHECK(io::parse_point("1/2,-3", Backend::rational) == Point{q(1, 2), q(-3)});
    CHECK(io::parse_box("-1,1", Backend::rational) == Box::interval(q(-1), q(1)));
    CHECK(io::parse_box("0,1;2,3", Backend::rational)
          == Box({q(0), q(2)}, {q(1), q(3)}));
    CHECK_THROWS_AS(io::parse_box("1", Backend::rational), ParseError);
    CHECK_THROWS(io::parse_box("1,0", Backend::rational)); // lower > upper

    PointSet scalars = io::parse_point_set("-1,1", Backend::rational);
    CHECK(scalars.dim() == 1);
    CHECK(scalars.size() == 2);
    PointSet pairs = io::parse_point_set("0,1;2,3", Backend::rational);
    CHECK(pairs.dim() == 2);
    CHECK(pairs.size() == 2);
}

TEST_CASE("missing network files raise errors") {
    CHECK_THROWS_AS(io::load_net_file("/nonexistent/net.json", Backend::rational), Error);
}
