#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kan/matrix.hpp"
#include "kan/rng.hpp"

namespace kan {

// Inputs shared by the basis-expansion generalization slacks. s, s_prime,
// C_prime, C_dprime are the moment parameters of the heavy-tailed loss
// condition; epsilon_conf / tau / eta split the failure probability.
struct BoundInputs {
    double alpha_tilde = 1.0;
    int d_tilde = 2;   // max layer width
    int p_tilde = 2;   // max basis count per activation
    double n = 1e4;    // sample count
    double M = 1.0;    // loss cap (bounded-loss slack only)
    double B_max = 1.0;  // max_i B(y_i)
    double epsilon_conf = 0.05;
    double tau = 0.05;
    double eta = 0.05;
    double s = 2.0;        // > 1
    double s_prime = 2.0;  // > 0
    double C_prime = 1.0;
    double C_dprime = 1.0;
};

// Inputs for the low-rank RKHS slacks. widths has length L+1 (d_0..d_L);
// ranks/radii/rho have length L. C_tilde is the unknown entropy constant,
// reported as a shape parameter (default 1).
struct LowRankInputs {
    std::vector<int> widths;
    std::vector<int> ranks;
    std::vector<double> radii;
    std::vector<double> rho;
    double nu = 1.0;
    double C_tilde = 1.0;
    double n = 1e4;
};

// Composed cover radii: s_1 = eps_1, s_{k+1} = rho_{k+1} s_k + eps_{k+1},
// equal to sum_{i<=k} (prod_{j=i+1}^{k} rho_j) eps_i.
std::vector<double> cover_radius_composition(std::span<const double> eps,
                                             std::span<const double> rho);

// log-cover of one basis-expansion layer: b^2 c^2 log(2 m p) / eps^2
double covering_bound_basis(double b, double c, int m, int p, double eps);

// log-cover of the composed network: alpha_tilde^3 log(2 d p) / eps^2
double covering_bound_kan(double alpha_tilde, int d_tilde, int p_tilde, double eps);

// Entropy-integral Rademacher bound 24 sqrt(zeta) {log(nM/(3 sqrt(zeta))) v 1} / n.
// Slack formulas use 6x this value (their 144 prefactor).
double dudley_term(double zeta, double n, double M);

// One labeled additive term of a slack formula; total = sum of terms.
struct SlackTerms {
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;
};

// Bounded-loss generalization slack:
//   144 sqrt(zeta){log(nM/(3 sqrt(zeta))) v 1}/n
//   + sqrt(4 M^2 log(2/eps)/n) + 32 M log(2/eps)/(3n),
// zeta = alpha_tilde^3 log(2 d p) B_max^2.
SlackTerms slack_thm_main_terms(const BoundInputs& in);
double slack_thm_main(const BoundInputs& in);

// Heavy-tailed (unbounded-loss) slack with truncation level M = n^{1/(2s)}:
//   144 sqrt(zeta0){log(n^{(2s+1)/(2s)}/(3 sqrt(zeta0))) v 1}/n
//   + 2 sqrt(log(2/eps))/n^{(s-1)/(2s)} + 32 log(2/eps)/(3 n^{(2s-1)/(2s)})
//   + 2 C'/(eta n^{(s-1)/(2s)}),
// zeta0 = alpha_tilde^3 log(2 d p) (n C''/tau)^{2/s'}.
SlackTerms slack_thm_main2_terms(const BoundInputs& in);
double slack_thm_main2(const BoundInputs& in);

// Excess-risk slack (requires s >= 2): the deviation term of the previous
// bound is replaced by (1 + eta^{-1/2}) sqrt(2 (C')^{2/s} log(2/eps)/n).
SlackTerms slack_excess_cor1_terms(const BoundInputs& in);
double slack_excess_cor1(const BoundInputs& in);

// Sub-exponential-tail slack:
//   144 sqrt(zeta0){log(C' n log n / sqrt(zeta0)) v 1}/n
//   + C' log(n) sqrt(log(2/eps))/sqrt(n) + C' log(n) log(2/eps)/(3n)
//   + C' sqrt(log(1/eta)/n),
// zeta0 = alpha_tilde^3 log(2 d p) (C' log(n C'/tau))^2.
SlackTerms slack_subexp_terms(const BoundInputs& in, double C_prime_const);
double slack_subexp(const BoundInputs& in, double C_prime_const = 1.0);

// Low-rank composed entropy:
//   sum_i d_i r_i (b_tilde prod_{j>i} rho_j / eps)^{(d_{i-1}/nu) v 1},
// b_i = C_tilde R_i sqrt(r_i n), b_tilde = sum b_i.
double lowrank_entropy(const LowRankInputs& in, double eps);

// xi = sum_i d_i r_i (loss_scale * b_tilde * prod_{j>i} rho_j)^{(d_{i-1}/nu) v 1}.
// loss_scale is max_i B(y_i) for the bounded-tail bound; the heavy-tailed
// variant passes the (n C''/tau)^{2/s'} quantile instead, which is the only
// difference between the two published forms.
double lowrank_xi(const LowRankInputs& in, double loss_scale);

// Low-rank slack (requires max width > nu):
//   6 C~' xi^{nu/d} / (n^{(nu/d+1)/2} (d/nu - 1)^{nu/d})
//   + sqrt(4 M^2 log(2/eps)/n) + 32 M log(2/eps)/(3n).
SlackTerms slack_thm_main3_terms(const LowRankInputs& in, double M, double B_max,
                                 double eps_conf, double C_tilde_prime = 1.0);
double slack_thm_main3(const LowRankInputs& in, double M, double B_max, double eps_conf,
                       double C_tilde_prime = 1.0);

// Constructive Maurey sparsification: draw k indices iid with probability
// a_l/||a||_1 until the draw's error meets the lemma's weighted bound
//   err^2 <= (||a||_1 / k) * sum_l a_l ||V_l||^2.
// Returns the best draw's counts (summing to k), its error, and the bound.
struct MaureyResult {
    std::vector<int> counts;
    double error = 0.0;
    double bound = 0.0;
    int resamples = 0;
};
MaureyResult maurey_sparsify(const std::vector<Matrix>& V, const std::vector<double>& a,
                             int k, RngState& rng, int max_resamples = 200,
                             bool stop_at_bound = true);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Empirical Rademacher complexity of the l2-ball linear class over the basis
// evaluations G (n x q). Per sign draw e the supremum is closed-form:
//   sup_{||beta|| <= B} sum_i e_i beta . g(x_i) = B ||G^T e||_2,
// so the estimate is the Monte-Carlo mean of (B/n) ||G^T e||_2.
McEstimate rademacher_linear_exact(const Matrix& G, double B_tilde, RngState& rng,
                                   int trials);

// Monte-Carlo Rademacher complexity of a finite candidate set. evaluate(X)
// returns a (candidates x n) matrix of function values; the per-draw
// supremum runs over its rows. A lower bound for any superset class.
McEstimate rademacher_mc_class(const std::function<Matrix(const Matrix&)>& evaluate,
                               const Matrix& X, RngState& rng, int trials);

}  // namespace kan
