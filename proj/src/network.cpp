#include "kan/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace kan {

namespace {

// Forward kernel for one sample. vals/derivs/masks are d_in*K scratch (derivs
// and masks may be null when not needed). Masks are drawn j-outer, k-inner.
void forward_row(const KanLayer& layer, const double* x, double dropout_rate, RngState* rng,
                 double* out, double* vals, double* derivs, double* masks) {
    const int d_in = layer.d_in;
    const int d_out = layer.d_out;
    const int K = layer.basis_size();

    for (int j = 0; j < d_in; ++j) {
        basis_eval(layer.basis, x[j], std::span<double>(vals + j * K, K));
        if (derivs) basis_derivative(layer.basis, x[j], std::span<double>(derivs + j * K, K));
    }
    if (masks) {
        const double keep = 1.0 - dropout_rate;
        for (int jk = 0; jk < d_in * K; ++jk)
            masks[jk] = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
    }

    // phi_jk = m_jk * (g_k(x_j) - g_k(0)), reused across all outputs
    thread_local std::vector<double> phi;
    phi.resize(static_cast<std::size_t>(d_in) * K);
    for (int j = 0; j < d_in; ++j)
        for (int k = 0; k < K; ++k) {
            const int jk = j * K + k;
            const double centered = vals[jk] - layer.basis_at_zero[k];
            phi[jk] = masks ? masks[jk] * centered : centered;
        }

    const int JK = d_in * K;
    for (int i = 0; i < d_out; ++i) {
        const double* wrow = layer.weights.data() + static_cast<std::size_t>(i) * JK;
        double acc = 0.0;
        for (int jk = 0; jk < JK; ++jk) acc += wrow[jk] * phi[jk];
        out[i] = acc;
    }
}

void check_dropout_args(double dropout_rate, const RngState* rng) {
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw std::invalid_argument("dropout_rate must be in [0,1)");
    if (dropout_rate > 0.0 && rng == nullptr)
        throw std::invalid_argument("dropout requires an rng");
}

}  // namespace

KanLayer::KanLayer(int d_in_, int d_out_, const EdgeBasis& basis_)
    : d_in(d_in_), d_out(d_out_), basis(basis_) {
    if (d_in < 1 || d_out < 1) throw std::invalid_argument("KanLayer: dims must be positive");
    weights.assign(static_cast<std::size_t>(d_out) * d_in * basis.total_count(), 0.0);
    basis_at_zero = basis_eval(basis, 0.0);
}

Matrix KanLayer::flattened() const {
    Matrix a(d_out, static_cast<std::size_t>(d_in) * basis_size());
    a.data = weights;
    return a;
}

std::vector<double> layer_forward(const KanLayer& layer, std::span<const double> x,
                                  double dropout_rate, RngState* rng) {
    if (static_cast<int>(x.size()) != layer.d_in)
        throw std::invalid_argument("layer_forward: input dimension mismatch");
    check_dropout_args(dropout_rate, rng);

    const int K = layer.basis_size();
    std::vector<double> vals(static_cast<std::size_t>(layer.d_in) * K);
    std::vector<double> masks;
    double* mask_ptr = nullptr;
    if (dropout_rate > 0.0) {
        masks.resize(vals.size());
        mask_ptr = masks.data();
    }
    std::vector<double> out(layer.d_out);
    forward_row(layer, x.data(), dropout_rate, rng, out.data(), vals.data(), nullptr, mask_ptr);
    return out;
}

Matrix network_forward(const KanNetwork& net, const Matrix& X, RunMode mode,
                       double dropout_rate, RngState* rng, ForwardTape* tape) {
    if (net.layers.empty()) throw std::invalid_argument("network_forward: empty network");
    if (static_cast<int>(X.cols) != net.input_dim())
        throw std::invalid_argument("network_forward: input width does not match shape[0]");
    const bool use_dropout = (mode == RunMode::train) && dropout_rate > 0.0;
    if (use_dropout) check_dropout_args(dropout_rate, rng);

    const std::size_t n = X.rows;
    if (tape) {
        tape->shape = net.shape;
        tape->n = n;
        tape->layers.assign(net.layers.size(), LayerTape{});
        tape->filled = true;
    }

    Matrix cur = X;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const KanLayer& layer = net.layers[l];
        const int K = layer.basis_size();
        const std::size_t row_jk = static_cast<std::size_t>(layer.d_in) * K;

        LayerTape* lt = tape ? &tape->layers[l] : nullptr;
        if (lt) {
            lt->inputs = cur;
            lt->basis_vals.resize(n * row_jk);
            lt->basis_derivs.resize(n * row_jk);
            if (use_dropout) lt->masks.resize(n * row_jk);
        }

        thread_local std::vector<double> scratch_vals, scratch_masks;
        scratch_vals.resize(row_jk);
        if (use_dropout && !lt) scratch_masks.resize(row_jk);

        Matrix next(n, layer.d_out);
        for (std::size_t s = 0; s < n; ++s) {
            double* vals = lt ? lt->basis_vals.data() + s * row_jk : scratch_vals.data();
            double* derivs = lt ? lt->basis_derivs.data() + s * row_jk : nullptr;
            double* masks = nullptr;
            if (use_dropout) masks = lt ? lt->masks.data() + s * row_jk : scratch_masks.data();
            forward_row(layer, cur.row(s), dropout_rate, rng, next.row(s), vals, derivs, masks);
        }
        cur = std::move(next);
    }
    return cur;
}

GradientSet zero_gradients(const KanNetwork& net) {
    GradientSet g(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l)
        g[l].assign(net.layers[l].weight_count(), 0.0);
    return g;
}

GradientSet network_backward(const KanNetwork& net, const ForwardTape& tape,
                             const Matrix& dL_dout) {
    if (!tape.filled || tape.shape != net.shape ||
        tape.layers.size() != net.layers.size())
        throw std::invalid_argument("network_backward: tape does not match network");
    if (dL_dout.rows != tape.n || static_cast<int>(dL_dout.cols) != net.output_dim())
        throw std::invalid_argument("network_backward: dL_dout shape mismatch");

    GradientSet grads = zero_gradients(net);
    Matrix up = dL_dout;

    for (int l = net.depth() - 1; l >= 0; --l) {
        const KanLayer& layer = net.layers[l];
        const LayerTape& lt = tape.layers[l];
        const int d_in = layer.d_in;
        const int d_out = layer.d_out;
        const int K = layer.basis_size();
        const std::size_t row_jk = static_cast<std::size_t>(d_in) * K;
        if (lt.basis_vals.size() != tape.n * row_jk)
            throw std::invalid_argument("network_backward: stale tape");

        Matrix down(tape.n, d_in);
        std::vector<double> phi(row_jk), mgd(row_jk);
        double* gw = grads[l].data();

        for (std::size_t s = 0; s < tape.n; ++s) {
            const double* vals = lt.basis_vals.data() + s * row_jk;
            const double* derivs = lt.basis_derivs.data() + s * row_jk;
            const double* masks = lt.masks.empty() ? nullptr : lt.masks.data() + s * row_jk;
            for (int j = 0; j < d_in; ++j)
                for (int k = 0; k < K; ++k) {
                    const int jk = j * K + k;
                    const double m = masks ? masks[jk] : 1.0;
                    phi[jk] = m * (vals[jk] - layer.basis_at_zero[k]);
                    mgd[jk] = m * derivs[jk];
                }
            const double* uprow = up.row(s);
            double* downrow = down.row(s);
            for (int i = 0; i < d_out; ++i) {
                const double u = uprow[i];
                const double* wrow = layer.weights.data() + static_cast<std::size_t>(i) * row_jk;
                double* grow = gw + static_cast<std::size_t>(i) * row_jk;
                for (int j = 0; j < d_in; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < K; ++k) {
                        const int jk = j * K + k;
                        grow[jk] += u * phi[jk];
                        acc += wrow[jk] * mgd[jk];
                    }
                    downrow[j] += u * acc;
                }
            }
        }
        up = std::move(down);
    }
    return grads;
}

void sgd_step(KanNetwork& net, const GradientSet& grads, double lr, double momentum,
              GradientSet& velocity) {
    if (lr < 0.0) throw std::invalid_argument("sgd_step: lr must be nonnegative");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("sgd_step: momentum must be in [0,1)");
    if (grads.size() != net.layers.size())
        throw std::invalid_argument("sgd_step: gradient count mismatch");
    if (velocity.empty()) velocity = zero_gradients(net);

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& w = net.layers[l].weights;
        auto& v = velocity[l];
        const auto& g = grads[l];
        if (g.size() != w.size() || v.size() != w.size())
            throw std::invalid_argument("sgd_step: buffer size mismatch");
        for (std::size_t idx = 0; idx < w.size(); ++idx) {
            v[idx] = momentum * v[idx] + g[idx];
            w[idx] -= lr * v[idx];
        }
    }
}

KanNetwork init_network(const std::vector<int>& shape, const EdgeBasis& basis,
                        std::uint64_t seed) {
    if (shape.size() < 2) throw std::invalid_argument("init_network: shape needs >= 2 entries");
    for (int d : shape)
        if (d < 1) throw std::invalid_argument("init_network: widths must be positive");

    KanNetwork net;
    net.shape = shape;
    RngState rng(seed);
    const double spline_sd = 0.1 / std::sqrt(static_cast<double>(basis.total_count()));
    for (std::size_t l = 0; l + 1 < shape.size(); ++l) {
        KanLayer layer(shape[l], shape[l + 1], basis);
        const int K = layer.basis_size();
        for (int i = 0; i < layer.d_out; ++i)
            for (int j = 0; j < layer.d_in; ++j)
                for (int k = 0; k < K; ++k) {
                    if (basis.includes_silu && k == 0)
                        layer.w(i, j, k) = 1.0 / layer.d_in;
                    else
                        layer.w(i, j, k) = spline_sd * rng.normal();
                }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::string checkpoint_to_json(const KanNetwork& net, std::uint64_t seed, int epoch) {
    nlohmann::json j;
    j["shape"] = net.shape;
    const EdgeBasis& b = net.layers.front().basis;
    j["basis"] = {{"degree", b.spec.degree},
                  {"grid_count", b.spec.grid_count},
                  {"grid_min", b.spec.grid_min},
                  {"grid_max", b.spec.grid_max},
                  {"includes_silu", b.includes_silu}};
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : net.layers) layers.push_back(layer.weights);
    j["layers"] = std::move(layers);
    j["seed"] = seed;
    j["epoch"] = epoch;
    return j.dump(2);
}

Checkpoint checkpoint_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Checkpoint cp;
    const std::vector<int> shape = j.at("shape").get<std::vector<int>>();
    const auto& jb = j.at("basis");
    EdgeBasis basis;
    basis.spec = SplineSpec::make(jb.at("degree").get<int>(), jb.at("grid_count").get<int>(),
                                  jb.at("grid_min").get<double>(), jb.at("grid_max").get<double>());
    basis.includes_silu = jb.at("includes_silu").get<bool>();

    cp.net.shape = shape;
    const auto& jl = j.at("layers");
    if (jl.size() + 1 != shape.size())
        throw std::runtime_error("checkpoint: layer count does not match shape");
    for (std::size_t l = 0; l < jl.size(); ++l) {
        KanLayer layer(shape[l], shape[l + 1], basis);
        std::vector<double> w = jl[l].get<std::vector<double>>();
        if (w.size() != layer.weight_count())
            throw std::runtime_error("checkpoint: coefficient count mismatch in layer " +
                                     std::to_string(l + 1));
        layer.weights = std::move(w);
        cp.net.layers.push_back(std::move(layer));
    }
    cp.seed = j.at("seed").get<std::uint64_t>();
    cp.epoch = j.at("epoch").get<int>();
    return cp;
}

void save_checkpoint(const KanNetwork& net, std::uint64_t seed, int epoch,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out << checkpoint_to_json(net, seed, epoch) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_json(ss.str());
}

}  // namespace kan
