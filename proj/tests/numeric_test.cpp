// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "ibpcert/numeric.hpp"

using namespace ibpcert;

namespace {
Scalar q(long num, long den = 1) { return Scalar::rational(num, den); }
}

TEST_CASE("rational arithmetic matches hand values") {
    CHECK(q(1, 3) + q(1, 6) == q(1, 2));
    CHECK(q(2) * q(0) == q(0));
    CHECK(q(7, 2) / q(7) == q(1, 2));
    CHECK(q(1, 3) - q(1, 2) == q(-1, 6));
    CHECK(-q(3, 4) == q(-3, 4));
}

TEST_CASE("rational results agree with an unreduced small-integer oracle") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> num(-40, 40);
    std::uniform_int_distribution<long> den(1, 40);
    for (int i = 0; i < 2000; ++i) {
        long p1 = num(rng), q1 = den(rng), p2 = num(rng), q2 = den(rng);
        Scalar a = q(p1, q1), b = q(p2, q2);
        // cross-multiplied comparison against the textbook formulas, never reduced
        auto agrees = [](const Scalar& got, long p, long qd) {
            return got.rat().get_num() * qd == mpz_class(p) * got.rat().get_den();
        };
        CHECK(agrees(a + b, p1 * q2 + p2 * q1, q1 * q2));
        CHECK(agrees(a - b, p1 * q2 - p2 * q1, q1 * q2));
        CHECK(agrees(a * b, p1 * p2, q1 * q2));
    }
}

TEST_CASE("division and sign handling") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<long> num(-40, 40);
    std::uniform_int_distribution<long> den(1, 40);
    for (int i = 0; i < 500; ++i) {
        long p1 = num(rng), q1 = den(rng), p2 = num(rng), q2 = den(rng);
        if (p2 == 0)
            continue;
        Scalar r = q(p1, q1) / q(p2, q2);
        // r * b == a exactly
        CHECK(r * q(p2, q2) == q(p1, q1));
        CHECK(r.rat().get_den() > 0);
    }
    CHECK_THROWS_AS(q(1) / q(0), DivisionByZero);
    CHECK_THROWS_AS(Scalar::real(1) / Scalar::real(0), DivisionByZero);
}

TEST_CASE("relu clamps, fixes zero, passes positives") {
    CHECK(relu(q(-3)) == q(0));
    CHECK(relu(q(0)) == q(0));
    CHECK(relu(q(5, 2)) == q(5, 2));
}

TEST_CASE("relu is idempotent and monotone") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<long> num(-64, 64);
    std::uniform_int_distribution<long> den(1, 16);
    for (int i = 0; i < 1000; ++i) {
        Scalar a = q(num(rng), den(rng)), b = q(num(rng), den(rng));
        CHECK(relu(relu(a)) == relu(a));
        if (a <= b)
            CHECK(relu(a) <= relu(b));
        else
            CHECK(relu(b) <= relu(a));
    }
}

TEST_CASE("backends never mix silently") {
    CHECK_THROWS_AS(q(1) + Scalar::real(1.0), BackendMismatch);
    CHECK_THROWS_AS(q(1) < Scalar::real(1.0), BackendMismatch);
    CHECK_THROWS_AS(Scalar::real(1.0).rat(), BackendMismatch);
    CHECK_THROWS_AS(q(1).flt(), BackendMismatch);
}

TEST_CASE("serialization round-trips") {
    CHECK(q(3, 4).str() == "3/4");
    CHECK(q(-7, 2).str() == "-7/2");
    CHECK(q(5).str() == "5");
    CHECK(Scalar::parse("3/4", Backend::rational) == q(3, 4));
    CHECK(Scalar::parse("-6/8", Backend::rational) == q(-3, 4));
    CHECK(Scalar::parse("5", Backend::rational) == q(5));
    CHECK(Scalar::parse("0.25", Backend::rational) == q(1, 4));
    CHECK(Scalar::parse("-1.5", Backend::rational) == q(-3, 2));
    CHECK_THROWS_AS(Scalar::parse("1/0", Backend::rational), ParseError);
    CHECK_THROWS_AS(Scalar::parse("abc", Backend::rational), ParseError);

    Scalar f = Scalar::real(0.1);
    CHECK(Scalar::parse(f.str(), Backend::binary64) == f);
    CHECK(Scalar::parse("1/2", Backend::binary64) == Scalar::real(0.5));
}

TEST_CASE("float to rational conversion is exact") {
    CHECK(Scalar::real(0.5).to_backend(Backend::rational) == q(1, 2));
    CHECK(Scalar::real(-0.75).to_backend(Backend::rational) == q(-3, 4));
    // 0.1 is a binary fraction, not 1/10
    Scalar tenth = Scalar::real(0.1).to_backend(Backend::rational);
    CHECK(tenth != q(1, 10));
    CHECK(tenth.to_double() == 0.1);
}

TEST_CASE("ceiling helper") {
    CHECK(ceil_to_long(q(2)) == 2);
    CHECK(ceil_to_long(q(5, 2)) == 3);
    CHECK(ceil_to_long(q(-1, 2)) == 0);
    CHECK(ceil_to_long(q(4, 2)) == 2);
}
