#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kan/matrix.hpp"
#include "kan/rng.hpp"
#include "kan/spline.hpp"

namespace kan {

// One KAN layer: every edge j->i carries a trainable univariate function
// expressed in the shared edge basis,
//   psi_ij(x) = sum_k W[i][j][k] * (g_k(x) - g_k(0)),
// and node i sums its incoming edges. Subtracting g_k(0) inside the edge
// activation makes the layer map 0 to 0 exactly.
struct KanLayer {
    int d_in = 0;
    int d_out = 0;
    EdgeBasis basis;
    std::vector<double> weights;        // d_out * d_in * total_count, (i,j,k) order
    std::vector<double> basis_at_zero;  // g_k(0), cached

    KanLayer() = default;
    KanLayer(int d_in, int d_out, const EdgeBasis& basis);

    int basis_size() const { return basis.total_count(); }
    std::size_t weight_count() const { return weights.size(); }

    double& w(int i, int j, int k) {
        return weights[(static_cast<std::size_t>(i) * d_in + j) * basis_size() + k];
    }
    double w(int i, int j, int k) const {
        return weights[(static_cast<std::size_t>(i) * d_in + j) * basis_size() + k];
    }

    // d_out x (d_in * total_count) coefficient matrix; its spectral norm
    // enters the layer Lipschitz bound
    Matrix flattened() const;
};

struct KanNetwork {
    std::vector<KanLayer> layers;
    std::vector<int> shape;  // d_0 .. d_L

    int depth() const { return static_cast<int>(layers.size()); }
    int input_dim() const { return shape.front(); }
    int output_dim() const { return shape.back(); }
};

// Per-layer cache of everything backward needs: inputs, raw basis values,
// basis derivatives and dropout masks, each n x (d_in * total_count) except
// inputs (n x d_in). masks is empty when no dropout was applied.
struct LayerTape {
    Matrix inputs;
    std::vector<double> basis_vals;
    std::vector<double> basis_derivs;
    std::vector<double> masks;
};

struct ForwardTape {
    std::vector<int> shape;
    std::size_t n = 0;
    std::vector<LayerTape> layers;
    bool filled = false;
};

// One gradient (or velocity) buffer per layer, same flat layout as weights.
using GradientSet = std::vector<std::vector<double>>;

enum class RunMode { train, eval };

// output[i] = sum_j sum_k W[i][j][k] * m_jk * (g_k(x_j) - g_k(0)).
// m_jk is an inverted-dropout mask, Bernoulli(1-rate)/(1-rate) per
// (input, basis) activation in train mode and identically 1 in eval mode.
std::vector<double> layer_forward(const KanLayer& layer, std::span<const double> x,
                                  double dropout_rate = 0.0, RngState* rng = nullptr);

// Row-wise composition of the layers. The tape, when supplied, is refilled
// with this call's caches; dropout masks are drawn layer-by-layer, sample-by-
// sample, so a fixed rng seed fixes the whole pass.
Matrix network_forward(const KanNetwork& net, const Matrix& X, RunMode mode,
                       double dropout_rate = 0.0, RngState* rng = nullptr,
                       ForwardTape* tape = nullptr);

// Exact gradients of the taped forward pass with respect to every
// coefficient. dL_dout is n x d_L. Throws if the tape does not match the
// network or was never filled.
GradientSet network_backward(const KanNetwork& net, const ForwardTape& tape,
                             const Matrix& dL_dout);

GradientSet zero_gradients(const KanNetwork& net);

// v <- momentum * v + g;  W <- W - lr * v.  velocity may be empty (treated
// as zeros and allocated).
void sgd_step(KanNetwork& net, const GradientSet& grads, double lr, double momentum,
              GradientSet& velocity);

// SiLU coefficients start at 1/d_in, spline coefficients iid
// N(0, 0.1^2 / total_count); draw order is (layer, i, j, k) so equal seeds
// give bit-identical networks.
KanNetwork init_network(const std::vector<int>& shape, const EdgeBasis& basis,
                        std::uint64_t seed);

struct Checkpoint {
    KanNetwork net;
    std::uint64_t seed = 0;
    int epoch = 0;
};

// JSON checkpoint: {shape, basis, per-layer flat coefficient arrays, seed,
// epoch}. Doubles are written in shortest round-trip form, so save/load is
// bit-exact.
void save_checkpoint(const KanNetwork& net, std::uint64_t seed, int epoch,
                     const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string checkpoint_to_json(const KanNetwork& net, std::uint64_t seed, int epoch);
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace kan
