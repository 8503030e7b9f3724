#include "kan/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kan/linalg.hpp"

namespace kan {

namespace {
double cbrt_sq(double x) { return std::cbrt(x * x); }  // x^{2/3} for x >= 0
}

LayerStats layer_stats(const KanLayer& layer, LipschitzMode mode) {
    LayerStats st;
    for (double w : layer.weights) st.B_l += std::abs(w);

    const std::vector<double> a_k = basis_lipschitz(layer.basis, mode);
    st.c_l = 0.0;
    st.sum_ak_sq = 0.0;
    for (double a : a_k) {
        st.c_l = std::max(st.c_l, a);
        st.sum_ak_sq += a * a;
    }

    st.sigma_A = spectral_norm(layer.flattened());
    st.rho_l = st.sigma_A * std::sqrt(st.sum_ak_sq);
    st.rho_coarse =
        st.sigma_A * st.c_l * std::sqrt(static_cast<double>(layer.d_in) * layer.basis_size());

    const std::vector<double> zero(layer.d_in, 0.0);
    const std::vector<double> at0 = layer_forward(layer, zero);
    double c2 = 0.0;
    for (double v : at0) c2 += v * v;
    st.C_l = std::sqrt(c2);
    return st;
}

std::pair<std::vector<double>, double> alpha_tilde(const std::vector<LayerStats>& stats,
                                                   double D) {
    if (stats.empty()) throw std::invalid_argument("alpha_tilde: no layer stats");
    if (D < 0.0) throw std::invalid_argument("alpha_tilde: D must be nonnegative");
    const int L = static_cast<int>(stats.size());

    double C = 0.0;
    for (const auto& s : stats) C = std::max(C, s.C_l);

    std::vector<double> alpha(L);
    double total = 0.0;
    for (int i = 1; i <= L; ++i) {
        double tail = 1.0;  // prod_{j=i+1}^{L} rho_j
        for (int j = i + 1; j <= L; ++j) tail *= stats[j - 1].rho_l;

        // C * sum_{j=0}^{i-1} prod_{k=i-j+1}^{i} rho_k + D * prod_{k=1}^{i} rho_k
        double csum = 0.0;
        for (int j = 0; j <= i - 1; ++j) {
            double prod = 1.0;
            for (int k = i - j + 1; k <= i; ++k) prod *= stats[k - 1].rho_l;
            csum += prod;
        }
        double head = 1.0;
        for (int k = 1; k <= i; ++k) head *= stats[k - 1].rho_l;

        const double inner = C * csum + D * head;
        alpha[i - 1] = cbrt_sq(stats[i - 1].B_l) * cbrt_sq(stats[i - 1].c_l) * cbrt_sq(tail) *
                       cbrt_sq(inner);
        total += alpha[i - 1];
    }
    return {std::move(alpha), total};
}

double complexity_measure(const std::vector<LayerStats>& stats, ComplexityMode mode) {
    if (stats.empty()) throw std::invalid_argument("complexity_measure: no layer stats");
    double rho_prod = 1.0;
    double sum_bc23 = 0.0;
    for (const auto& s : stats) {
        rho_prod *= s.rho_l;
        sum_bc23 += cbrt_sq(s.B_l * s.c_l);
    }
    if (mode == ComplexityMode::section3) return cbrt_sq(rho_prod) * sum_bc23;
    return rho_prod * std::pow(sum_bc23, 1.5);
}

std::vector<double> normalize_series(const std::vector<double>& v,
                                     const std::vector<double>& u) {
    if (v.empty() || v.size() != u.size())
        throw std::invalid_argument("normalize_series: need equal nonempty series");
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    if (*mx == *mn)
        throw std::invalid_argument("normalize_series: constant series, normalization undefined");
    const double scale = u.back() / (*mx - *mn);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *mn) * scale;
    return out;
}

ComplexityReport complexity_report(const KanNetwork& net, double D, LipschitzMode mode) {
    ComplexityReport rep;
    rep.D = D;
    rep.layer_stats.reserve(net.layers.size());
    for (const auto& layer : net.layers) rep.layer_stats.push_back(layer_stats(layer, mode));
    auto [alpha, total] = alpha_tilde(rep.layer_stats, D);
    rep.alpha = std::move(alpha);
    rep.alpha_tilde = total;
    rep.measure = complexity_measure(rep.layer_stats, ComplexityMode::section3);
    rep.r_kan = complexity_measure(rep.layer_stats, ComplexityMode::r_kan);
    return rep;
}

}  // namespace kan
