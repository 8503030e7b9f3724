// Independent second transcriptions of the printed slack formulas, written
// as literal one-expression translations. Test-only: a transcription error
// in the library cannot hide here too.
#pragma once

#include <algorithm>
#include <cmath>

#include "kan/bounds.hpp"

namespace slack_reference {

inline double thm_main(const kan::BoundInputs& i) {
    const double zeta = std::pow(i.alpha_tilde, 3.0) * std::log(2.0 * i.d_tilde * i.p_tilde) *
                        std::pow(i.B_max, 2.0);
    return 144.0 * std::sqrt(zeta) *
               std::max(std::log(i.n * i.M / (3.0 * std::sqrt(zeta))), 1.0) / i.n +
           std::sqrt(4.0 * std::pow(i.M, 2.0) * std::log(2.0 / i.epsilon_conf) / i.n) +
           32.0 * i.M * std::log(2.0 / i.epsilon_conf) / (3.0 * i.n);
}

inline double thm_main2(const kan::BoundInputs& i) {
    const double zeta0 = std::pow(i.alpha_tilde, 3.0) * std::log(2.0 * i.d_tilde * i.p_tilde) *
                         std::pow(i.n * i.C_dprime / i.tau, 2.0 / i.s_prime);
    return 144.0 * std::sqrt(zeta0) *
               std::max(std::log(std::pow(i.n, (2.0 * i.s + 1.0) / (2.0 * i.s)) /
                                 (3.0 * std::sqrt(zeta0))),
                        1.0) /
               i.n +
           2.0 * std::sqrt(std::log(2.0 / i.epsilon_conf)) /
               std::pow(i.n, (i.s - 1.0) / (2.0 * i.s)) +
           32.0 * std::log(2.0 / i.epsilon_conf) /
               (3.0 * std::pow(i.n, (2.0 * i.s - 1.0) / (2.0 * i.s))) +
           2.0 * i.C_prime / (i.eta * std::pow(i.n, (i.s - 1.0) / (2.0 * i.s)));
}

inline double cor1(const kan::BoundInputs& i) {
    const double zeta0 = std::pow(i.alpha_tilde, 3.0) * std::log(2.0 * i.d_tilde * i.p_tilde) *
                         std::pow(i.n * i.C_dprime / i.tau, 2.0 / i.s_prime);
    return 144.0 * std::sqrt(zeta0) *
               std::max(std::log(std::pow(i.n, (2.0 * i.s + 1.0) / (2.0 * i.s)) /
                                 (3.0 * std::sqrt(zeta0))),
                        1.0) /
               i.n +
           (1.0 + std::pow(i.eta, -0.5)) *
               std::sqrt(2.0 * std::pow(i.C_prime, 2.0 / i.s) *
                         std::log(2.0 / i.epsilon_conf) / i.n) +
           32.0 * std::log(2.0 / i.epsilon_conf) /
               (3.0 * std::pow(i.n, (2.0 * i.s - 1.0) / (2.0 * i.s))) +
           2.0 * i.C_prime / (i.eta * std::pow(i.n, (i.s - 1.0) / (2.0 * i.s)));
}

inline double subexp(const kan::BoundInputs& i, double C) {
    const double zeta0 = std::pow(i.alpha_tilde, 3.0) * std::log(2.0 * i.d_tilde * i.p_tilde) *
                         std::pow(C * std::log(i.n * C / i.tau), 2.0);
    return 144.0 * std::sqrt(zeta0) *
               std::max(std::log(C * i.n * std::log(i.n) / std::sqrt(zeta0)), 1.0) / i.n +
           C * std::log(i.n) * std::sqrt(std::log(2.0 / i.epsilon_conf)) / std::sqrt(i.n) +
           C * std::log(i.n) * std::log(2.0 / i.epsilon_conf) / (3.0 * i.n) +
           C * std::sqrt(std::log(1.0 / i.eta) / i.n);
}

inline double lowrank_entropy(const kan::LowRankInputs& in, double eps) {
    const std::size_t L = in.widths.size() - 1;
    double bt = 0.0;
    for (std::size_t i = 0; i < L; ++i)
        bt += in.C_tilde * in.radii[i] * std::sqrt(in.ranks[i] * in.n);
    double total = 0.0;
    for (std::size_t i = 1; i <= L; ++i) {
        double tail = 1.0;
        for (std::size_t j = i + 1; j <= L; ++j) tail *= in.rho[j - 1];
        total += in.widths[i] * in.ranks[i - 1] *
                 std::pow(bt * tail / eps, std::max(in.widths[i - 1] / in.nu, 1.0));
    }
    return total;
}

inline double thm_main3(const kan::LowRankInputs& in, double M, double B_max, double eps,
                        double C_tilde_prime) {
    const std::size_t L = in.widths.size() - 1;
    double bt = 0.0;
    for (std::size_t i = 0; i < L; ++i)
        bt += in.C_tilde * in.radii[i] * std::sqrt(in.ranks[i] * in.n);
    double xi = 0.0;
    for (std::size_t i = 1; i <= L; ++i) {
        double tail = 1.0;
        for (std::size_t j = i + 1; j <= L; ++j) tail *= in.rho[j - 1];
        xi += in.widths[i] * in.ranks[i - 1] *
              std::pow(B_max * bt * tail, std::max(in.widths[i - 1] / in.nu, 1.0));
    }
    double d = 0.0;
    for (int w : in.widths) d = std::max(d, double(w));
    return 6.0 * C_tilde_prime * std::pow(xi, in.nu / d) /
               (std::pow(in.n, (in.nu / d + 1.0) / 2.0) *
                std::pow(d / in.nu - 1.0, in.nu / d)) +
           std::sqrt(4.0 * M * M * std::log(2.0 / eps) / in.n) +
           32.0 * M * std::log(2.0 / eps) / (3.0 * in.n);
}

inline kan::BoundInputs random_inputs(kan::RngState& rng) {
    kan::BoundInputs in;
    in.alpha_tilde = rng.uniform(0.5, 5.0);
    in.d_tilde = 2 + static_cast<int>(rng.uniform_index(62));
    in.p_tilde = 2 + static_cast<int>(rng.uniform_index(30));
    in.n = std::floor(rng.uniform(1e3, 1e6));
    in.M = rng.uniform(1.0, 10.0);
    in.B_max = rng.uniform(0.5, 3.0);
    in.epsilon_conf = rng.uniform(0.01, 0.2);
    in.tau = rng.uniform(0.01, 0.2);
    in.eta = rng.uniform(0.01, 0.2);
    in.s = rng.uniform(2.0, 4.0);
    in.s_prime = rng.uniform(1.5, 3.0);
    in.C_prime = rng.uniform(0.5, 2.0);
    in.C_dprime = rng.uniform(0.5, 2.0);
    return in;
}

inline kan::LowRankInputs random_lowrank(kan::RngState& rng) {
    kan::LowRankInputs in;
    const int L = 1 + static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i <= L; ++i) in.widths.push_back(2 + static_cast<int>(rng.uniform_index(7)));
    for (int i = 0; i < L; ++i) {
        in.ranks.push_back(1 + static_cast<int>(rng.uniform_index(3)));
        in.radii.push_back(rng.uniform(0.5, 2.0));
        in.rho.push_back(rng.uniform(0.8, 1.5));
    }
    int dmax = 0;
    for (int w : in.widths) dmax = std::max(dmax, w);
    in.nu = rng.uniform(0.5, 0.9 * dmax);
    in.C_tilde = rng.uniform(0.5, 2.0);
    in.n = std::floor(rng.uniform(1e3, 1e6));
    return in;
}

}  // namespace slack_reference
