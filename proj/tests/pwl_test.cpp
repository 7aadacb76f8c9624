// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "ibpcert/pwl.hpp"
#include "support/generators.hpp"

using namespace ibpcert;
namespace gen = ibpcert::testing;

namespace {
Scalar q(long num, long den = 1) { return Scalar::rational(num, den); }
} // namespace

TEST_CASE("basic algebra") {
    PwlFunction id = PwlFunction::identity();
    CHECK(id.value(q(7)) == q(7));
    PwlFunction two_x = id.scaled(q(2));
    CHECK(two_x.value(q(-3)) == q(-6));
    PwlFunction sum = two_x.plus(PwlFunction::constant(q(1)));
    CHECK(sum.value(q(5)) == q(11));
}

TEST_CASE("clamp inserts the exact crossing") {
    PwlFunction hinge = PwlFunction::identity().plus(PwlFunction::constant(q(-1, 3))).clamped();
    // relu(x - 1/3)
    CHECK(hinge.value(q(0)) == q(0));
    CHECK(hinge.value(q(1, 3)) == q(0));
    CHECK(hinge.value(q(1)) == q(2, 3));
    REQUIRE(hinge.breakpoints().size() == 1);
    CHECK(hinge.breakpoints()[0] == q(1, 3));
}

TEST_CASE("symbolic application agrees with concrete evaluation") {
    gen::Rng rng(307);
    std::uniform_int_distribution<int> depth(0, 5);
    for (int iter = 0; iter < 200; ++iter) {
        NetPtr f = gen::rand_net(rng, 1, 1, depth(rng));
        PwlFunction graph = scalar_pwl(f);
        for (int s = 0; s < 8; ++s) {
            Scalar x = gen::rand_rational(rng, 16, 2);
            CHECK(graph.value(x) == eval_scalar(f, x));
        }
        // probe right at the breakpoints too
        for (const Scalar& b : graph.breakpoints())
            CHECK(graph.value(b) == eval_scalar(f, b));
    }
}

TEST_CASE("zero sets of the absolute-value dip") {
    // |x| - 1 via a single-layer net
    SingleLayerNet s{{q(1), q(-1)}, {q(0), q(0)}, {q(1), q(1)}, q(-1)};
    PwlFunction graph = scalar_pwl(compile_single_layer(s));
    auto zeros = graph.zeros_in(q(-2), q(2));
    REQUIRE(zeros.size() == 2);
    CHECK(zeros[0].first == q(-1));
    CHECK(zeros[0].second == q(-1));
    CHECK(zeros[1].first == q(1));
    CHECK(zeros[1].second == q(1));
}

TEST_CASE("zero sets report flat stretches as intervals") {
    PwlFunction clamp = PwlFunction::identity().clamped(); // relu(x)
    auto zeros = clamp.zeros_in(q(-2), q(2));
    REQUIRE(zeros.size() == 1);
    CHECK(zeros[0].first == q(-2));
    CHECK(zeros[0].second == q(0));

    auto none = clamp.zeros_in(q(1), q(2));
    CHECK(none.empty());
}

TEST_CASE("rational backend is enforced") {
    CHECK_THROWS_AS(PwlFunction::constant(Scalar::real(1.0)), BackendMismatch);
}
