// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "ibpcert/analyze.hpp"
#include "ibpcert/net.hpp"
#include "support/generators.hpp"

using namespace ibpcert;
namespace gen = ibpcert::testing;

namespace {
Scalar q(long num, long den = 1) { return Scalar::rational(num, den); }

size_t recomputed_out_dim(const NetPtr& f);

size_t recomputed_in_dim(const NetPtr& f) {
    switch (f->kind()) {
    case NodeKind::sequential: return recomputed_in_dim(f->second());
    case NodeKind::duplicate: return f->in_dim();
    case NodeKind::parallel:
        return recomputed_in_dim(f->first()) + recomputed_in_dim(f->second());
    case NodeKind::constant:
    case NodeKind::scale:
    case NodeKind::relu: return 1;
    case NodeKind::add: return 2;
    }
    return 0;
}

size_t recomputed_out_dim(const NetPtr& f) {
    switch (f->kind()) {
    case NodeKind::sequential: return recomputed_out_dim(f->first());
    case NodeKind::duplicate: return 2 * f->in_dim();
    case NodeKind::parallel:
        return recomputed_out_dim(f->first()) + recomputed_out_dim(f->second());
    case NodeKind::constant:
    case NodeKind::scale:
    case NodeKind::relu:
    case NodeKind::add: return 1;
    }
    return 0;
}

void check_dims_consistent(const NetPtr& f) {
    CHECK(f->in_dim() == recomputed_in_dim(f));
    CHECK(f->out_dim() == recomputed_out_dim(f));
    if (f->has_children()) {
        check_dims_consistent(f->first());
        check_dims_consistent(f->second());
    }
}
} // namespace

TEST_CASE("primitive evaluation") {
    CHECK(eval_scalar(Net::relu(), q(-5)) == q(0));
    CHECK(eval_scalar(Net::scale(q(3)), q(2)) == q(6));
    CHECK(eval_scalar(Net::constant(q(9)), q(2)) == q(9));
    CHECK(eval(Net::add(), {q(2), q(5)}) == Point{q(7)});
    CHECK(eval(Net::duplicate(2), {q(1), q(2)}) == Point{q(1), q(2), q(1), q(2)});
}

TEST_CASE("node construction guards") {
    CHECK_THROWS_AS(Net::scale(q(0)), PreconditionError);
    CHECK_THROWS_AS(Net::sequential(Net::add(), Net::relu()), DimensionError);
    CHECK_THROWS_AS(eval(Net::relu(), {q(1), q(2)}), DimensionError);
}

TEST_CASE("affine compilation on hand examples") {
    NetPtr f = compile_affine({{q(2)}}, {q(1)});
    CHECK(eval_scalar(f, q(3)) == q(7));

    NetPtr g = compile_affine({{q(1)}, {q(-1)}}, {q(0), q(0)});
    CHECK(eval(g, {q(5)}) == Point{q(5), q(-5)});

    // identity row propagates a box unchanged through the transformer
    NetPtr id = compile_affine({{q(1)}}, {q(0)});
    CHECK(analyze(id, Box::interval(q(0), q(1))) == Box::interval(q(0), q(1)));
}

TEST_CASE("affine compilation equals the matrix product on random instances") {
    gen::Rng rng(101);
    std::uniform_int_distribution<size_t> dim(1, 3);
    for (int iter = 0; iter < 300; ++iter) {
        size_t m = dim(rng), n = dim(rng);
        std::vector<std::vector<Scalar>> w(m, std::vector<Scalar>(n, q(0)));
        std::vector<Scalar> c(m, q(0));
        for (auto& row : w)
            for (Scalar& v : row)
                v = gen::rand_rational(rng);
        for (Scalar& v : c)
            v = gen::rand_rational(rng);
        NetPtr f = compile_affine(w, c);
        CHECK(f->in_dim() == n);
        CHECK(f->out_dim() == m);
        Point x;
        for (size_t i = 0; i < n; ++i)
            x.push_back(gen::rand_rational(rng));
        Point got = eval(f, x);
        for (size_t r = 0; r < m; ++r) {
            Scalar want = c[r];
            for (size_t i = 0; i < n; ++i)
                want = want + w[r][i] * x[i];
            CHECK(got[r] == want);
        }
        check_dims_consistent(f);
    }
}

TEST_CASE("single-layer compilation on hand examples") {
    SingleLayerNet plain_relu{{q(1)}, {q(0)}, {q(1)}, q(0)};
    CHECK(eval_scalar(compile_single_layer(plain_relu), q(-2)) == q(0));

    SingleLayerNet absolute{{q(1), q(-1)}, {q(0), q(0)}, {q(1), q(1)}, q(0)};
    CHECK(eval_scalar(compile_single_layer(absolute), q(3)) == q(3));
    CHECK(eval_scalar(compile_single_layer(absolute), q(-3)) == q(3));
}

TEST_CASE("single-layer compilation matches the closed formula") {
    gen::Rng rng(103);
    std::uniform_int_distribution<size_t> width(1, 6);
    for (int iter = 0; iter < 300; ++iter) {
        SingleLayerNet s;
        size_t n = width(rng);
        for (size_t i = 0; i < n; ++i) {
            s.pre_weights.push_back(gen::rand_rational(rng));
            s.pre_bias.push_back(gen::rand_rational(rng));
            s.post_weights.push_back(gen::rand_rational(rng));
        }
        s.post_bias = gen::rand_rational(rng);
        NetPtr f = compile_single_layer(s);
        for (int t = 0; t < 5; ++t) {
            Scalar x = gen::rand_rational(rng);
            CHECK(eval_scalar(f, x) == s.eval(x));
        }
        check_dims_consistent(f);
    }
}

TEST_CASE("interval result is independent of addition fold order") {
    // left fold (the canonical compilation) vs a hand-built right fold
    std::vector<Scalar> w{q(2), q(-3), q(1, 2)};
    Scalar c = q(1);
    NetPtr left = compile_affine({w}, {c});

    NetPtr terms = Net::parallel(
        Net::parallel(Net::scale(w[0]), Net::scale(w[1])), Net::scale(w[2]));
    NetPtr right_fold = Net::sequential(
        Net::add(), Net::parallel(Net::scale(q(1)),
                                  Net::sequential(Net::add(), identity_net(2))));
    // right_fold sums (t0, t1, t2) as t0 + (t1 + t2)
    NetPtr right = Net::sequential(detail::add_constant_net(c, Backend::rational),
                                   Net::sequential(right_fold, terms));
    REQUIRE(left->in_dim() == 3);
    REQUIRE(right->in_dim() == 3);

    gen::Rng rng(107);
    for (int iter = 0; iter < 100; ++iter) {
        Box b = gen::rand_box(rng, 3);
        CHECK(analyze(left, b) == analyze(right, b));
        Point x = gen::rand_point_in(rng, b);
        CHECK(eval(left, x) == eval(right, x));
    }
}

TEST_CASE("random nets keep cached dimensions consistent") {
    gen::Rng rng(109);
    std::uniform_int_distribution<size_t> dim(1, 3);
    std::uniform_int_distribution<int> depth(0, 5);
    for (int iter = 0; iter < 200; ++iter) {
        NetPtr f = gen::rand_net(rng, dim(rng), dim(rng), depth(rng));
        check_dims_consistent(f);
    }
}

TEST_CASE("backend conversion round-trips structure") {
    SingleLayerNet s{{q(1), q(-2)}, {q(0), q(1)}, {q(1), q(1)}, q(-1)};
    NetPtr f = compile_single_layer(s);
    NetPtr as_float = convert(f, Backend::binary64);
    NetPtr back = convert(as_float, Backend::rational);
    CHECK(eval_scalar(back, q(3)) == eval_scalar(f, q(3)));
    CHECK(eval_scalar(as_float, Scalar::real(3.0)).flt()
          == doctest::Approx(eval_scalar(f, q(3)).to_double()));
}
