// Copyright (c) ibpcert contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "ibpcert/certify.hpp"
#include "ibpcert/net.hpp"

namespace ibpcert {

// Experiment plumbing: float-side gradient descent used only to generate
// inputs for the limit experiments. Nothing here carries proof weight; the
// trained parameters are snapped to exact rationals before any exact check.

struct FlipTrainConfig {
    size_t width = 10;
    size_t flip_count = 7;
    double alpha = 1.0;
    size_t steps = 1000;
    double learning_rate = 2.0;  // multiplier on the curvature-scaled step
    double momentum = 0.97;      // heavy-ball coefficient
    double hinge_weight = 0.05;  // weight of the interval hinge term
    double hinge_margin = 0.1;   // certified margin the hinge pushes toward
    unsigned seed = 0;
};

/// Raw float parameters of a one-hidden-layer scalar network.
struct TrainedSingleLayer {
    std::vector<double> pre_w, pre_b, post_w;
    double post_b = 0;

    size_t width() const { return pre_w.size(); }

    double eval(double x) const {
        double acc = post_b;
        for (size_t i = 0; i < width(); ++i)
            acc += post_w[i] * std::max(pre_w[i] * x + pre_b[i], 0.0);
        return acc;
    }

    double max_fit_residual(size_t k) const {
        double worst = 0;
        for (size_t i = 1; i <= k; ++i) {
            double want = i % 2 == 0 ? 1.0 : -1.0;
            worst = std::max(worst, std::fabs(eval(2.0 * static_cast<double>(i)) - want));
        }
        return worst;
    }

    SingleLayerNet to_layer(Backend b) const {
        SingleLayerNet s;
        for (size_t i = 0; i < width(); ++i) {
            s.pre_weights.push_back(Scalar::real(pre_w[i]).to_backend(b));
            s.pre_bias.push_back(Scalar::real(pre_b[i]).to_backend(b));
            s.post_weights.push_back(Scalar::real(post_w[i]).to_backend(b));
        }
        s.post_bias = Scalar::real(post_b).to_backend(b);
        return s;
    }
};

/// Full-batch gradient descent on squared fit error plus an interval hinge
/// over the flip task. The hinge term rewards certified margin through the
/// closed-form interval bounds, i.e. it trains toward provability; the
/// point of the experiment is that certification still fails.
inline TrainedSingleLayer train_flip_classifier(const FlipTrainConfig& cfg) {
    if (cfg.width == 0 || cfg.flip_count == 0)
        throw PreconditionError("empty training configuration");
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> jitter(-0.8, 0.8);
    std::uniform_real_distribution<double> slope(0.75, 1.25);

    // kinks on a jittered grid across the data range, alternating slopes
    double span = 2.0 * cfg.flip_count;
    TrainedSingleLayer net;
    net.pre_w.resize(cfg.width);
    net.pre_b.resize(cfg.width);
    net.post_w.assign(cfg.width, 0.0);
    for (size_t i = 0; i < cfg.width; ++i) {
        double sign = i % 2 == 0 ? 1.0 : -1.0;
        double kink = 1.0 + span * (static_cast<double>(i) + 0.5)
                                / static_cast<double>(cfg.width)
                      + jitter(rng);
        net.pre_w[i] = sign * slope(rng);
        net.pre_b[i] = -net.pre_w[i] * kink;
    }

    size_t k = cfg.flip_count;
    std::vector<double> xs(k), ls(k);
    for (size_t j = 0; j < k; ++j) {
        xs[j] = 2.0 * static_cast<double>(j + 1);
        ls[j] = (j + 1) % 2 == 0 ? 1.0 : -1.0;
    }

    // curvature-scaled steps: the output layer sees a quadratic whose
    // Lipschitz constant is bounded through the feature second moment
    double second_moment = 0;
    for (size_t j = 0; j < k; ++j)
        for (size_t i = 0; i < cfg.width; ++i)
            second_moment += std::pow(std::max(net.pre_w[i] * xs[j] + net.pre_b[i], 0.0), 2);
    double out_lr = cfg.learning_rate / (2.0 * second_moment / static_cast<double>(k) + 1.0);
    double in_lr = 0.1 * out_lr;

    std::vector<double> g_pre_w(cfg.width), g_pre_b(cfg.width), g_post_w(cfg.width);
    std::vector<double> v_pre_w(cfg.width, 0.0), v_pre_b(cfg.width, 0.0),
        v_post_w(cfg.width, 0.0);
    double v_post_b = 0;
    for (size_t step = 0; step < cfg.steps; ++step) {
        std::fill(g_pre_w.begin(), g_pre_w.end(), 0.0);
        std::fill(g_pre_b.begin(), g_pre_b.end(), 0.0);
        std::fill(g_post_w.begin(), g_post_w.end(), 0.0);
        double g_post_b = 0;
        for (size_t j = 0; j < k; ++j) {
            // fit term
            double err = 2.0 * (net.eval(xs[j]) - ls[j]) / static_cast<double>(k);
            for (size_t i = 0; i < cfg.width; ++i) {
                double pre = net.pre_w[i] * xs[j] + net.pre_b[i];
                if (pre > 0) {
                    g_post_w[i] += err * pre;
                    g_pre_w[i] += err * net.post_w[i] * xs[j];
                    g_pre_b[i] += err * net.post_w[i];
                }
            }
            g_post_b += err;
            if (cfg.hinge_weight <= 0)
                continue;
            // interval hinge: margin = l * center - radius of the closed form
            double center = net.post_b, radius = 0;
            for (size_t i = 0; i < cfg.width; ++i) {
                double pre = net.pre_w[i] * xs[j] + net.pre_b[i];
                double spread = cfg.alpha * std::fabs(net.pre_w[i]);
                double vp = std::max(pre + spread, 0.0);
                double vm = std::max(pre - spread, 0.0);
                center += net.post_w[i] * 0.5 * (vp + vm);
                radius += std::fabs(net.post_w[i]) * 0.5 * (vp - vm);
            }
            if (ls[j] * center - radius >= cfg.hinge_margin)
                continue;
            double scale = cfg.hinge_weight / static_cast<double>(k);
            for (size_t i = 0; i < cfg.width; ++i) {
                double pre = net.pre_w[i] * xs[j] + net.pre_b[i];
                double sgn_w = net.pre_w[i] >= 0 ? 1.0 : -1.0;
                double sgn_m = net.post_w[i] >= 0 ? 1.0 : -1.0;
                double spread = cfg.alpha * std::fabs(net.pre_w[i]);
                double vp = std::max(pre + spread, 0.0);
                double vm = std::max(pre - spread, 0.0);
                double dvp_w = vp > 0 ? xs[j] + cfg.alpha * sgn_w : 0.0;
                double dvm_w = vm > 0 ? xs[j] - cfg.alpha * sgn_w : 0.0;
                double dvp_b = vp > 0 ? 1.0 : 0.0;
                double dvm_b = vm > 0 ? 1.0 : 0.0;
                // d(-l*center + radius)
                g_post_w[i] += scale * (-ls[j] * 0.5 * (vp + vm) + sgn_m * 0.5 * (vp - vm));
                g_pre_w[i] += scale * (-ls[j] * net.post_w[i] * 0.5 * (dvp_w + dvm_w)
                                       + std::fabs(net.post_w[i]) * 0.5 * (dvp_w - dvm_w));
                g_pre_b[i] += scale * (-ls[j] * net.post_w[i] * 0.5 * (dvp_b + dvm_b)
                                       + std::fabs(net.post_w[i]) * 0.5 * (dvp_b - dvm_b));
            }
            g_post_b += scale * (-ls[j]);
        }
        for (size_t i = 0; i < cfg.width; ++i) {
            v_pre_w[i] = cfg.momentum * v_pre_w[i] - in_lr * g_pre_w[i];
            v_pre_b[i] = cfg.momentum * v_pre_b[i] - in_lr * g_pre_b[i];
            v_post_w[i] = cfg.momentum * v_post_w[i] - out_lr * g_post_w[i];
            net.pre_w[i] += v_pre_w[i];
            net.pre_b[i] += v_pre_b[i];
            net.post_w[i] += v_post_w[i];
        }
        v_post_b = cfg.momentum * v_post_b - out_lr * g_post_b;
        net.post_b += v_post_b;
    }
    return net;
}

namespace detail {

/// Exact Gaussian elimination solve of a square rational system; nullopt on
/// a singular matrix.
inline std::optional<std::vector<Scalar>> solve_rational(std::vector<std::vector<Scalar>> m,
                                                         std::vector<Scalar> rhs) {
    size_t n = rhs.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        while (pivot < n && m[pivot][col].sign() == 0)
            ++pivot;
        if (pivot == n)
            return std::nullopt;
        std::swap(m[pivot], m[col]);
        std::swap(rhs[pivot], rhs[col]);
        for (size_t row = 0; row < n; ++row) {
            if (row == col || m[row][col].sign() == 0)
                continue;
            Scalar factor = m[row][col] / m[col][col];
            for (size_t c = col; c < n; ++c)
                m[row][c] = m[row][c] - factor * m[col][c];
            rhs[row] = rhs[row] - factor * rhs[col];
        }
    }
    std::vector<Scalar> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i)
        out.push_back(rhs[i] / m[i][i]);
    return out;
}

} // namespace detail

/// Snap a trained network to exact rationals and correct its output layer
/// by the least-norm solution making the flip fit exact. The correction is
/// the limit of gradient descent on the fit term restricted to the output
/// layer, computed in closed form so the exact-classifier gate can hold.
/// Returns nullopt when the hidden features are too degenerate to fit.
inline std::optional<SingleLayerNet> refit_exact_fit(const TrainedSingleLayer& t, size_t k) {
    SingleLayerNet s = t.to_layer(Backend::rational);
    size_t w = s.width();
    std::vector<Flip> data = flips(k, Backend::rational);

    // feature matrix rows: (relu(pre), 1) per flip
    std::vector<std::vector<Scalar>> features(k);
    std::vector<Scalar> residual(k, Scalar::rational(0));
    for (size_t j = 0; j < k; ++j) {
        features[j].reserve(w + 1);
        for (size_t i = 0; i < w; ++i)
            features[j].push_back(relu(s.pre_weights[i] * data[j].point + s.pre_bias[i]));
        features[j].push_back(Scalar::rational(1));
        residual[j] = Scalar::from_int(data[j].label, Backend::rational) - s.eval(data[j].point);
    }

    // least-norm correction: delta = A^T z with (A A^T) z = residual
    std::vector<std::vector<Scalar>> gram(k, std::vector<Scalar>(k, Scalar::rational(0)));
    for (size_t a = 0; a < k; ++a)
        for (size_t b = 0; b < k; ++b) {
            Scalar acc = Scalar::rational(0);
            for (size_t i = 0; i <= w; ++i)
                acc = acc + features[a][i] * features[b][i];
            gram[a][b] = acc;
        }
    auto z = detail::solve_rational(std::move(gram), residual);
    if (!z)
        return std::nullopt;
    for (size_t i = 0; i < w; ++i) {
        Scalar delta = Scalar::rational(0);
        for (size_t j = 0; j < k; ++j)
            delta = delta + features[j][i] * (*z)[j];
        s.post_weights[i] = s.post_weights[i] + delta;
    }
    Scalar delta_bias = Scalar::rational(0);
    for (size_t j = 0; j < k; ++j)
        delta_bias = delta_bias + features[j][w] * (*z)[j];
    s.post_bias = s.post_bias + delta_bias;

    for (size_t j = 0; j < k; ++j)
        if (s.eval(data[j].point) != Scalar::from_int(data[j].label, Backend::rational))
            throw InternalCheckError("exact refit failed to interpolate");
    return s;
}

struct MlpTrainConfig {
    std::vector<size_t> hidden = {8, 8};
    size_t steps = 4000;
    double learning_rate = 0.02;
    unsigned seed = 0;
};

/// Small dense MLP on scalars, trained by backprop on mean squared error
/// over the three-point dataset {(-2,-1), (0,1), (2,-1)}.
struct TrainedMlp {
    // weights[l][r][c]: layer l, output row r, input column c
    std::vector<std::vector<std::vector<double>>> weights;
    std::vector<std::vector<double>> biases;

    double eval(double x) const {
        std::vector<double> act{x};
        for (size_t l = 0; l < weights.size(); ++l) {
            std::vector<double> next(weights[l].size());
            for (size_t r = 0; r < next.size(); ++r) {
                double acc = biases[l][r];
                for (size_t c = 0; c < act.size(); ++c)
                    acc += weights[l][r][c] * act[c];
                next[r] = l + 1 < weights.size() ? std::max(acc, 0.0) : acc;
            }
            act = std::move(next);
        }
        return act[0];
    }

    /// Exact float-to-rational snap, compiled to the inductive form.
    NetPtr to_net() const {
        std::vector<DenseLayer> layers;
        for (size_t l = 0; l < weights.size(); ++l) {
            DenseLayer layer;
            for (const auto& row : weights[l]) {
                std::vector<Scalar> r;
                for (double v : row)
                    r.push_back(Scalar::real(v).to_backend(Backend::rational));
                layer.weights.push_back(std::move(r));
            }
            for (double v : biases[l])
                layer.bias.push_back(Scalar::real(v).to_backend(Backend::rational));
            layer.relu_activated = l + 1 < weights.size();
            layers.push_back(std::move(layer));
        }
        return compile_layered(layers);
    }
};

inline TrainedMlp train_three_point_mlp(const MlpTrainConfig& cfg) {
    const double xs[3] = {-2, 0, 2};
    const double ys[3] = {-1, 1, -1};
    std::mt19937 rng(cfg.seed);

    std::vector<size_t> dims{1};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(1);

    TrainedMlp net;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        double bound = std::sqrt(2.0 / static_cast<double>(dims[l]));
        std::uniform_real_distribution<double> init(-bound, bound);
        std::vector<std::vector<double>> w(dims[l + 1], std::vector<double>(dims[l]));
        std::vector<double> b(dims[l + 1]);
        for (auto& row : w)
            for (double& v : row)
                v = init(rng);
        for (double& v : b)
            v = init(rng);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }

    size_t depth = net.weights.size();
    for (size_t step = 0; step < cfg.steps; ++step) {
        auto gw = net.weights; // zero-filled gradient buffers of matching shape
        auto gb = net.biases;
        for (auto& layer : gw)
            for (auto& row : layer)
                std::fill(row.begin(), row.end(), 0.0);
        for (auto& layer : gb)
            std::fill(layer.begin(), layer.end(), 0.0);

        for (int p = 0; p < 3; ++p) {
            std::vector<std::vector<double>> acts{{xs[p]}};
            std::vector<std::vector<double>> pres;
            for (size_t l = 0; l < depth; ++l) {
                std::vector<double> pre(net.weights[l].size());
                for (size_t r = 0; r < pre.size(); ++r) {
                    pre[r] = net.biases[l][r];
                    for (size_t c = 0; c < acts.back().size(); ++c)
                        pre[r] += net.weights[l][r][c] * acts.back()[c];
                }
                pres.push_back(pre);
                if (l + 1 < depth)
                    for (double& v : pre)
                        v = std::max(v, 0.0);
                acts.push_back(std::move(pre));
            }
            std::vector<double> grad{2.0 * (acts.back()[0] - ys[p]) / 3.0};
            for (size_t l = depth; l-- > 0;) {
                std::vector<double> prev_grad(acts[l].size(), 0.0);
                for (size_t r = 0; r < grad.size(); ++r) {
                    double g = grad[r];
                    if (l + 1 < depth && pres[l][r] <= 0)
                        g = 0;
                    gb[l][r] += g;
                    for (size_t c = 0; c < acts[l].size(); ++c) {
                        gw[l][r][c] += g * acts[l][c];
                        prev_grad[c] += g * net.weights[l][r][c];
                    }
                }
                grad = std::move(prev_grad);
            }
        }
        for (size_t l = 0; l < depth; ++l) {
            for (size_t r = 0; r < net.weights[l].size(); ++r) {
                net.biases[l][r] -= cfg.learning_rate * gb[l][r];
                for (size_t c = 0; c < net.weights[l][r].size(); ++c)
                    net.weights[l][r][c] -= cfg.learning_rate * gw[l][r][c];
            }
        }
    }
    return net;
}

} // namespace ibpcert
