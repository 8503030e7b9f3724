#pragma once

#include <utility>
#include <vector>

#include "kan/network.hpp"
#include "kan/spline.hpp"

namespace kan {

// Per-layer statistics of one parameter snapshot.
//   B_l      l1 norm of all layer coefficients
//   c_l      largest per-basis Lipschitz constant a_k
//   sigma_A  spectral norm of the d_out x (d_in*K) coefficient matrix
//   rho_l    layer Lipschitz upper bound sigma_A * sqrt(sum_k a_k^2); the sum
//            runs over the K per-edge basis functions once — the flattened
//            basis vector repeats the same block per input coordinate, but
//            only the coordinate an input perturbation touches moves
//   rho_coarse  sigma_A * c_l * sqrt(d_in*K), the blunt form kept for audit
//   C_l      ||Psi_l(0)||_2, identically zero under centering
struct LayerStats {
    double B_l = 0.0;
    double c_l = 0.0;
    double rho_l = 0.0;
    double rho_coarse = 0.0;
    double sigma_A = 0.0;
    double sum_ak_sq = 0.0;
    double C_l = 0.0;
};

enum class ComplexityMode { section3, r_kan };

struct ComplexityReport {
    std::vector<LayerStats> layer_stats;
    double D = 0.0;  // ||X||_2 (Frobenius) of the training design
    std::vector<double> alpha;
    double alpha_tilde = 0.0;
    double measure = 0.0;  // (prod rho_j)^{2/3} * sum (B_i c_i)^{2/3}
    double r_kan = 0.0;    // (prod rho_j) * (sum (B_i c_i)^{2/3})^{3/2}
};

LayerStats layer_stats(const KanLayer& layer, LipschitzMode mode);

// alpha_i = B_i^{2/3} c_i^{2/3} (prod_{j>i} rho_j)^{2/3}
//           * (C * sum_{j=0}^{i-1} prod_{k=i-j+1}^{i} rho_k
//              + D * prod_{k=1}^{i} rho_k)^{2/3},
// with C = max_l C_l and empty products equal to 1. Returns (alpha list,
// their sum). With C = 0 the sum collapses to
// (D prod rho_j)^{2/3} * sum (B_i c_i)^{2/3}.
std::pair<std::vector<double>, double> alpha_tilde(const std::vector<LayerStats>& stats,
                                                   double D);

double complexity_measure(const std::vector<LayerStats>& stats, ComplexityMode mode);

// v'_i = (v_i - v_min) * u_N / (v_max - v_min). Throws when v is constant
// (normalization undefined); callers may substitute the zero series.
std::vector<double> normalize_series(const std::vector<double>& v,
                                     const std::vector<double>& u);

// Full snapshot: per-layer stats plus every aggregate.
ComplexityReport complexity_report(const KanNetwork& net, double D, LipschitzMode mode);

}  // namespace kan
