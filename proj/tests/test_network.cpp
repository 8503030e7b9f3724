#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "kan/network.hpp"
#include "oracles.hpp"

using kan::EdgeBasis;
using kan::ForwardTape;
using kan::KanLayer;
using kan::KanNetwork;
using kan::Matrix;
using kan::RngState;
using kan::RunMode;
using kan::SplineSpec;

namespace {

EdgeBasis default_basis(int p = 3, int G = 5) {
    EdgeBasis b;
    b.spec = SplineSpec::make(p, G, -1.0, 1.0);
    return b;
}

KanNetwork random_network(const std::vector<int>& shape, std::uint64_t seed, int p = 3,
                          int G = 5) {
    return kan::init_network(shape, default_basis(p, G), seed);
}

// Straightforward per-sample re-implementation of the forward pass.
std::vector<double> naive_forward(const KanNetwork& net, std::vector<double> x) {
    for (const auto& layer : net.layers) {
        std::vector<double> out(layer.d_out, 0.0);
        for (int i = 0; i < layer.d_out; ++i)
            for (int j = 0; j < layer.d_in; ++j) {
                const auto g = kan::basis_eval(layer.basis, x[j]);
                const auto g0 = kan::basis_eval(layer.basis, 0.0);
                for (int k = 0; k < layer.basis_size(); ++k)
                    out[i] += layer.w(i, j, k) * (g[k] - g0[k]);
            }
        x = std::move(out);
    }
    return x;
}

}  // namespace

TEST_CASE("layer maps zero to zero for any weights") {
    RngState rng(3);
    KanLayer layer(3, 2, default_basis());
    for (auto& w : layer.weights) w = rng.normal();
    const std::vector<double> zero(3, 0.0);
    for (double v : kan::layer_forward(layer, zero)) CHECK(v == 0.0);
}

TEST_CASE("zero weights give zero output") {
    KanLayer layer(2, 2, default_basis());
    const std::vector<double> x = {0.4, -0.7};
    for (double v : kan::layer_forward(layer, x)) CHECK(v == 0.0);
}

TEST_CASE("single silu edge") {
    EdgeBasis basis = default_basis();
    basis.includes_silu = true;
    // keep only the silu coefficient
    KanLayer layer(1, 1, basis);
    layer.w(0, 0, 0) = 1.0;
    const auto out = kan::layer_forward(layer, std::vector<double>{1.0});
    CHECK(out[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("network forward equals the naive oracle") {
    const KanNetwork net = random_network({3, 4, 2}, 77);
    RngState rng(5);
    Matrix X(3, 3);
    for (auto& v : X.data) v = rng.uniform(-1.5, 1.5);

    const Matrix out = kan::network_forward(net, X, RunMode::eval);
    for (std::size_t s = 0; s < X.rows; ++s) {
        const auto want = naive_forward(net, {X(s, 0), X(s, 1), X(s, 2)});
        for (std::size_t i = 0; i < out.cols; ++i)
            CHECK(out(s, i) == doctest::Approx(want[i]).epsilon(1e-12));
    }

    // zero input matrix composes to zero output
    const Matrix z = kan::network_forward(net, Matrix(4, 3), RunMode::eval);
    for (double v : z.data) CHECK(v == 0.0);
}

TEST_CASE("single-layer network equals layer_forward") {
    const KanNetwork net = random_network({3, 2}, 9);
    Matrix X(2, 3);
    RngState rng(6);
    for (auto& v : X.data) v = rng.uniform(-1.0, 1.0);
    const Matrix out = kan::network_forward(net, X, RunMode::eval);
    for (std::size_t s = 0; s < X.rows; ++s) {
        const auto want =
            kan::layer_forward(net.layers[0], std::span<const double>(X.row(s), 3));
        for (std::size_t i = 0; i < out.cols; ++i) CHECK(out(s, i) == want[i]);
    }
}

TEST_CASE("backward: zero upstream and the linear-in-W case") {
    const KanNetwork net = random_network({2, 3, 1}, 13);
    Matrix X(2, 2);
    X(0, 0) = 0.3;
    X(0, 1) = -0.4;
    X(1, 0) = -0.9;
    X(1, 1) = 0.8;
    ForwardTape tape;
    kan::network_forward(net, X, RunMode::eval, 0.0, nullptr, &tape);
    const auto grads = kan::network_backward(net, tape, Matrix(2, 1));
    for (const auto& g : grads)
        for (double v : g) CHECK(v == 0.0);

    // single layer, single coefficient: grad = (g_k(x) - g_k(0)) * upstream
    KanNetwork single;
    single.shape = {1, 1};
    single.layers.emplace_back(1, 1, default_basis());
    Matrix x1(1, 1);
    x1(0, 0) = 0.6;
    ForwardTape t1;
    kan::network_forward(single, x1, RunMode::eval, 0.0, nullptr, &t1);
    Matrix up(1, 1);
    up(0, 0) = 2.5;
    const auto g1 = kan::network_backward(single, t1, up);
    const auto gv = kan::basis_eval(single.layers[0].basis, 0.6);
    const auto g0 = kan::basis_eval(single.layers[0].basis, 0.0);
    for (int k = 0; k < single.layers[0].basis_size(); ++k)
        CHECK(g1[0][k] == doctest::Approx((gv[k] - g0[k]) * 2.5).epsilon(1e-12));
}

TEST_CASE("backward matches finite differences on random networks") {
    RngState rng(31);
    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        KanNetwork net = random_network({4, 3, 2}, 100 + rep, 2, 4);
        const std::size_t n = 3;
        Matrix X(n, 4);
        for (auto& v : X.data) v = rng.uniform(-1.2, 1.2);
        Matrix up(n, 2);
        for (auto& v : up.data) v = rng.uniform(-1.0, 1.0);

        ForwardTape tape;
        kan::network_forward(net, X, RunMode::eval, 0.0, nullptr, &tape);
        const auto grads = kan::network_backward(net, tape, up);

        auto loss_of = [&](const KanNetwork& candidate) {
            const Matrix out = kan::network_forward(candidate, X, RunMode::eval);
            double s = 0.0;
            for (std::size_t idx = 0; idx < out.data.size(); ++idx)
                s += out.data[idx] * up.data[idx];
            return s;
        };

        for (std::size_t l = 0; l < net.layers.size(); ++l)
            for (std::size_t idx = 0; idx < net.layers[l].weights.size(); idx += 7) {
                const double h = 1e-5;
                KanNetwork plus = net, minus = net;
                plus.layers[l].weights[idx] += h;
                minus.layers[l].weights[idx] -= h;
                const double fd = (loss_of(plus) - loss_of(minus)) / (2.0 * h);
                const double an = grads[l][idx];
                const double err = std::abs(an - fd) / std::max(1.0, std::abs(fd));
                worst = std::max(worst, err);
            }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("sgd step") {
    KanNetwork net;
    net.shape = {1, 1};
    EdgeBasis basis = default_basis();
    basis.includes_silu = true;
    net.layers.emplace_back(1, 1, basis);
    const int K = net.layers[0].basis_size();

    kan::GradientSet zero(1, std::vector<double>(K, 0.0));
    kan::GradientSet vel;
    net.layers[0].w(0, 0, 0) = 1.0;
    kan::sgd_step(net, zero, 0.5, 0.0, vel);
    CHECK(net.layers[0].w(0, 0, 0) == 1.0);

    kan::GradientSet g(1, std::vector<double>(K, 0.0));
    g[0][0] = 0.25;
    kan::sgd_step(net, g, 1.0, 0.0, vel);
    CHECK(net.layers[0].w(0, 0, 0) == doctest::Approx(0.75));

    // two momentum steps against the hand-unrolled recursion:
    // v1 = g, w1 = w0 - lr g; v2 = mu g + g, w2 = w1 - lr (mu g + g)
    net.layers[0].w(0, 0, 0) = 1.0;
    vel.clear();
    const double lr = 0.1, mu = 0.9, gv = 0.2;
    g[0].assign(K, 0.0);
    g[0][0] = gv;
    kan::sgd_step(net, g, lr, mu, vel);
    kan::sgd_step(net, g, lr, mu, vel);
    const double expected = 1.0 - lr * gv - lr * (mu * gv + gv);
    CHECK(net.layers[0].w(0, 0, 0) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("init_network: determinism, shapes, silu coefficients") {
    const KanNetwork a = random_network({4, 50, 100, 50, 1}, 2024);
    const KanNetwork b = random_network({4, 50, 100, 50, 1}, 2024);
    REQUIRE(a.layers.size() == 4);
    CHECK(a.layers[1].d_in == 50);
    CHECK(a.layers[1].d_out == 100);
    for (std::size_t l = 0; l < a.layers.size(); ++l)
        CHECK(a.layers[l].weights == b.layers[l].weights);

    const KanNetwork c = random_network({2, 1}, 5);
    for (int j = 0; j < 2; ++j) CHECK(c.layers[0].w(0, j, 0) == 0.5);

    CHECK_THROWS_AS(kan::init_network({3}, default_basis(), 0), std::invalid_argument);
    CHECK_THROWS_AS(kan::init_network({3, 0}, default_basis(), 0), std::invalid_argument);
}

TEST_CASE("train-mode dropout averages to the eval output") {
    const KanNetwork net = random_network({2, 2}, 55);
    Matrix X(1, 2);
    X(0, 0) = 0.7;
    X(0, 1) = -0.3;
    const Matrix eval_out = kan::network_forward(net, X, RunMode::eval);

    RngState rng(77);
    const int trials = 20000;
    const double rate = 0.25;
    std::vector<double> mean(2, 0.0), m2(2, 0.0);
    for (int t = 0; t < trials; ++t) {
        const Matrix out = kan::network_forward(net, X, RunMode::train, rate, &rng);
        for (int i = 0; i < 2; ++i) {
            const double d = out(0, i) - mean[i];
            mean[i] += d / (t + 1);
            m2[i] += d * (out(0, i) - mean[i]);
        }
    }
    for (int i = 0; i < 2; ++i) {
        const double se = std::sqrt(m2[i] / (trials - 1)) / std::sqrt(double(trials));
        CHECK(std::abs(mean[i] - eval_out(0, i)) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("last layer is positively homogeneous in its coefficients") {
    KanNetwork net = random_network({3, 3, 2}, 91);
    Matrix X(2, 3);
    RngState rng(8);
    for (auto& v : X.data) v = rng.uniform(-1.0, 1.0);
    const Matrix base = kan::network_forward(net, X, RunMode::eval);
    for (auto& w : net.layers.back().weights) w *= 3.5;
    const Matrix scaled = kan::network_forward(net, X, RunMode::eval);
    for (std::size_t i = 0; i < base.data.size(); ++i)
        CHECK(scaled.data[i] == doctest::Approx(3.5 * base.data[i]).epsilon(1e-12));
}

TEST_CASE("backward rejects mismatched tapes") {
    const KanNetwork net = random_network({2, 2}, 1);
    const KanNetwork other = random_network({2, 3, 2}, 1);
    Matrix X(2, 2);
    ForwardTape tape;
    kan::network_forward(net, X, RunMode::eval, 0.0, nullptr, &tape);
    CHECK_THROWS_AS(kan::network_backward(other, tape, Matrix(2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(kan::network_backward(net, ForwardTape{}, Matrix(2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(kan::network_backward(net, tape, Matrix(3, 2)), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    const KanNetwork net = random_network({3, 4, 1}, 321);
    const std::string path = "checkpoint_test.json";
    kan::save_checkpoint(net, 321, 17, path);
    const kan::Checkpoint cp = kan::load_checkpoint(path);
    std::filesystem::remove(path);

    CHECK(cp.seed == 321);
    CHECK(cp.epoch == 17);
    CHECK(cp.net.shape == net.shape);
    REQUIRE(cp.net.layers.size() == net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l)
        CHECK(cp.net.layers[l].weights == net.layers[l].weights);  // bit-equal
}
