// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "ibpcert/single_layer.hpp"
#include "ibpcert/train.hpp"
#include "ibpcert/witness.hpp"

using namespace ibpcert;

TEST_CASE("flip training is deterministic per seed") {
    FlipTrainConfig cfg;
    cfg.seed = 42;
    TrainedSingleLayer a = train_flip_classifier(cfg);
    TrainedSingleLayer b = train_flip_classifier(cfg);
    CHECK(a.pre_w == b.pre_w);
    CHECK(a.pre_b == b.pre_b);
    CHECK(a.post_w == b.post_w);
    CHECK(a.post_b == b.post_b);

    cfg.seed = 43;
    TrainedSingleLayer c = train_flip_classifier(cfg);
    CHECK(a.pre_w != c.pre_w);
}

TEST_CASE("training reduces the fit residual") {
    FlipTrainConfig cfg;
    cfg.seed = 5;
    FlipTrainConfig untrained = cfg;
    untrained.steps = 0;
    double before = train_flip_classifier(untrained).max_fit_residual(cfg.flip_count);
    double after = train_flip_classifier(cfg).max_fit_residual(cfg.flip_count);
    CHECK(after < before);
    CHECK(after < 0.5);
}

TEST_CASE("exact refit interpolates the flips") {
    for (unsigned seed : {0u, 1u, 2u}) {
        FlipTrainConfig cfg;
        cfg.seed = seed;
        TrainedSingleLayer t = train_flip_classifier(cfg);
        auto exact = refit_exact_fit(t, cfg.flip_count);
        REQUIRE(exact.has_value());
        CHECK(classifies_flips_exactly(*exact, cfg.flip_count));
        // the refit only moved the output layer
        for (size_t i = 0; i < t.width(); ++i) {
            CHECK(exact->pre_weights[i] == Scalar::real(t.pre_w[i]).to_backend(Backend::rational));
            CHECK(exact->pre_bias[i] == Scalar::real(t.pre_b[i]).to_backend(Backend::rational));
        }
        // and the refit net passes the float gate after rounding back
        NetPtr as_float = convert(compile_single_layer(*exact), Backend::binary64);
        CHECK(is_approx_flip_classifier(as_float, cfg.flip_count));
    }
}

TEST_CASE("three-point MLP fits the dataset signs") {
    MlpTrainConfig cfg;
    cfg.seed = 1;
    TrainedMlp mlp = train_three_point_mlp(cfg);
    CHECK(mlp.eval(-2) < 0);
    CHECK(mlp.eval(0) > 0);
    CHECK(mlp.eval(2) < 0);

    NetPtr snapped = mlp.to_net();
    // the rational snap reproduces the float evaluation exactly at the data
    for (double x : {-2.0, 0.0, 2.0}) {
        Scalar xs = Scalar::real(x).to_backend(Backend::rational);
        CHECK(eval_scalar(snapped, xs).to_double() == doctest::Approx(mlp.eval(x)).epsilon(1e-12));
    }
    // and supports the demonstration pipeline
    ThreePointDemo demo = three_point_demo(snapped);
    CHECK(demo.relative_subset_ok);
    CHECK(demo.target_in_output_ok);
}
