#include "kan/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kan {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double cube(double x) { return x * x * x; }

double sum_terms(SlackTerms& t) {
    t.total = 0.0;
    for (const auto& [name, v] : t.terms) t.total += v;
    return t.total;
}

void check_common(const BoundInputs& in) {
    require(in.alpha_tilde >= 0.0, "bounds: alpha_tilde must be nonnegative");
    require(in.d_tilde >= 1 && in.p_tilde >= 1, "bounds: d_tilde/p_tilde must be positive");
    require(in.n >= 1.0, "bounds: n must be >= 1");
    require(in.epsilon_conf > 0.0 && in.epsilon_conf < 1.0, "bounds: epsilon_conf in (0,1)");
    require(in.tau > 0.0 && in.tau < 1.0, "bounds: tau in (0,1)");
    require(in.eta > 0.0 && in.eta < 1.0, "bounds: eta in (0,1)");
}

}  // namespace

std::vector<double> cover_radius_composition(std::span<const double> eps,
                                             std::span<const double> rho) {
    require(!eps.empty() && eps.size() == rho.size(),
            "cover_radius_composition: need equal nonempty lists");
    std::vector<double> s(eps.size());
    s[0] = eps[0];
    for (std::size_t k = 1; k < eps.size(); ++k) s[k] = rho[k] * s[k - 1] + eps[k];
    return s;
}

double covering_bound_basis(double b, double c, int m, int p, double eps) {
    require(b > 0.0 && c > 0.0 && m >= 1 && p >= 1 && eps > 0.0,
            "covering_bound_basis: inputs must be positive");
    return b * b * c * c * std::log(2.0 * m * p) / (eps * eps);
}

double covering_bound_kan(double alpha_tilde, int d_tilde, int p_tilde, double eps) {
    require(alpha_tilde > 0.0 && d_tilde >= 1 && p_tilde >= 1 && eps > 0.0,
            "covering_bound_kan: inputs must be positive");
    return cube(alpha_tilde) * std::log(2.0 * d_tilde * p_tilde) / (eps * eps);
}

double dudley_term(double zeta, double n, double M) {
    require(zeta > 0.0 && n > 0.0 && M > 0.0, "dudley_term: inputs must be positive");
    const double root = std::sqrt(zeta);
    return 24.0 * root * std::max(std::log(n * M / (3.0 * root)), 1.0) / n;
}

SlackTerms slack_thm_main_terms(const BoundInputs& in) {
    check_common(in);
    require(in.M > 0.0 && in.B_max > 0.0, "slack_thm_main: M and B_max must be positive");
    const double zeta =
        cube(in.alpha_tilde) * std::log(2.0 * in.d_tilde * in.p_tilde) * in.B_max * in.B_max;
    const double log2e = std::log(2.0 / in.epsilon_conf);

    SlackTerms t;
    t.terms.emplace_back("entropy (144 sqrt(zeta) log.../n)", 6.0 * dudley_term(zeta, in.n, in.M));
    t.terms.emplace_back("deviation sqrt(4 M^2 log(2/eps)/n)",
                         std::sqrt(4.0 * in.M * in.M * log2e / in.n));
    t.terms.emplace_back("tail 32 M log(2/eps)/(3n)", 32.0 * in.M * log2e / (3.0 * in.n));
    sum_terms(t);
    return t;
}

double slack_thm_main(const BoundInputs& in) { return slack_thm_main_terms(in).total; }

SlackTerms slack_thm_main2_terms(const BoundInputs& in) {
    check_common(in);
    require(in.s > 1.0, "slack_thm_main2: s must exceed 1");
    require(in.s_prime > 0.0, "slack_thm_main2: s_prime must be positive");
    require(in.C_prime > 0.0 && in.C_dprime > 0.0,
            "slack_thm_main2: moment constants must be positive");

    const double zeta0 = cube(in.alpha_tilde) * std::log(2.0 * in.d_tilde * in.p_tilde) *
                         std::pow(in.n * in.C_dprime / in.tau, 2.0 / in.s_prime);
    const double log2e = std::log(2.0 / in.epsilon_conf);
    const double M = std::pow(in.n, 1.0 / (2.0 * in.s));  // truncation level

    SlackTerms t;
    t.terms.emplace_back("entropy (144 sqrt(zeta0) log.../n)",
                         6.0 * dudley_term(zeta0, in.n, M));
    t.terms.emplace_back("deviation 2 sqrt(log(2/eps))/n^{(s-1)/(2s)}",
                         2.0 * std::sqrt(log2e) / std::pow(in.n, (in.s - 1.0) / (2.0 * in.s)));
    t.terms.emplace_back(
        "tail 32 log(2/eps)/(3 n^{(2s-1)/(2s)})",
        32.0 * log2e / (3.0 * std::pow(in.n, (2.0 * in.s - 1.0) / (2.0 * in.s))));
    t.terms.emplace_back(
        "truncation 2C'/(eta n^{(s-1)/(2s)})",
        2.0 * in.C_prime / (in.eta * std::pow(in.n, (in.s - 1.0) / (2.0 * in.s))));
    sum_terms(t);
    return t;
}

double slack_thm_main2(const BoundInputs& in) { return slack_thm_main2_terms(in).total; }

SlackTerms slack_excess_cor1_terms(const BoundInputs& in) {
    require(in.s >= 2.0, "slack_excess_cor1: requires s >= 2");
    SlackTerms t = slack_thm_main2_terms(in);
    const double log2e = std::log(2.0 / in.epsilon_conf);
    t.terms[1] = {"deviation (1+eta^{-1/2}) sqrt(2 (C')^{2/s} log(2/eps)/n)",
                  (1.0 + 1.0 / std::sqrt(in.eta)) *
                      std::sqrt(2.0 * std::pow(in.C_prime, 2.0 / in.s) * log2e / in.n)};
    sum_terms(t);
    return t;
}

double slack_excess_cor1(const BoundInputs& in) { return slack_excess_cor1_terms(in).total; }

SlackTerms slack_subexp_terms(const BoundInputs& in, double C) {
    check_common(in);
    require(C > 0.0, "slack_subexp: constant must be positive");
    const double logn = std::log(in.n);
    const double zeta0 = cube(in.alpha_tilde) * std::log(2.0 * in.d_tilde * in.p_tilde) *
                         std::pow(C * std::log(in.n * C / in.tau), 2.0);
    const double log2e = std::log(2.0 / in.epsilon_conf);
    const double root = std::sqrt(zeta0);

    SlackTerms t;
    t.terms.emplace_back("entropy 144 sqrt(zeta0){log(C n log n/sqrt(zeta0)) v 1}/n",
                         144.0 * root * std::max(std::log(C * in.n * logn / root), 1.0) / in.n);
    t.terms.emplace_back("deviation C log(n) sqrt(log(2/eps))/sqrt(n)",
                         C * logn * std::sqrt(log2e) / std::sqrt(in.n));
    t.terms.emplace_back("tail C log(n) log(2/eps)/(3n)", C * logn * log2e / (3.0 * in.n));
    t.terms.emplace_back("truncation C sqrt(log(1/eta)/n)",
                         C * std::sqrt(std::log(1.0 / in.eta) / in.n));
    sum_terms(t);
    return t;
}

double slack_subexp(const BoundInputs& in, double C_prime_const) {
    return slack_subexp_terms(in, C_prime_const).total;
}

namespace {

void check_lowrank(const LowRankInputs& in) {
    require(in.widths.size() >= 2, "lowrank: widths needs d_0..d_L");
    const std::size_t L = in.widths.size() - 1;
    require(in.ranks.size() == L && in.radii.size() == L && in.rho.size() == L,
            "lowrank: ranks/radii/rho must have one entry per layer");
    require(in.nu > 0.0, "lowrank: nu must be positive");
    require(in.C_tilde > 0.0, "lowrank: C_tilde must be positive");
    require(in.n >= 1.0, "lowrank: n must be >= 1");
    for (int r : in.ranks) require(r >= 1, "lowrank: ranks must be >= 1");
    for (int d : in.widths) require(d >= 1, "lowrank: widths must be >= 1");
}

double b_tilde_of(const LowRankInputs& in) {
    double bt = 0.0;
    for (std::size_t i = 0; i < in.ranks.size(); ++i)
        bt += in.C_tilde * in.radii[i] * std::sqrt(in.ranks[i] * in.n);
    return bt;
}

}  // namespace

double lowrank_entropy(const LowRankInputs& in, double eps) {
    check_lowrank(in);
    require(eps > 0.0, "lowrank_entropy: eps must be positive");
    const std::size_t L = in.widths.size() - 1;
    const double bt = b_tilde_of(in);
    double total = 0.0;
    for (std::size_t i = 1; i <= L; ++i) {
        double tail = 1.0;
        for (std::size_t j = i + 1; j <= L; ++j) tail *= in.rho[j - 1];
        const double expo = std::max(in.widths[i - 1] / in.nu, 1.0);
        total += in.widths[i] * in.ranks[i - 1] * std::pow(bt * tail / eps, expo);
    }
    return total;
}

double lowrank_xi(const LowRankInputs& in, double loss_scale) {
    check_lowrank(in);
    require(loss_scale > 0.0, "lowrank_xi: loss scale must be positive");
    const std::size_t L = in.widths.size() - 1;
    const double bt = b_tilde_of(in);
    double xi = 0.0;
    for (std::size_t i = 1; i <= L; ++i) {
        double tail = 1.0;
        for (std::size_t j = i + 1; j <= L; ++j) tail *= in.rho[j - 1];
        const double expo = std::max(in.widths[i - 1] / in.nu, 1.0);
        xi += in.widths[i] * in.ranks[i - 1] * std::pow(loss_scale * bt * tail, expo);
    }
    return xi;
}

SlackTerms slack_thm_main3_terms(const LowRankInputs& in, double M, double B_max,
                                 double eps_conf, double C_tilde_prime) {
    check_lowrank(in);
    require(M > 0.0 && B_max > 0.0, "slack_thm_main3: M and B_max must be positive");
    require(eps_conf > 0.0 && eps_conf < 1.0, "slack_thm_main3: eps_conf in (0,1)");
    require(C_tilde_prime > 0.0, "slack_thm_main3: constant must be positive");

    const double d_tilde = static_cast<double>(*std::max_element(in.widths.begin(), in.widths.end()));
    if (!(d_tilde > in.nu))
        throw std::invalid_argument("slack_thm_main3: requires max width > nu");

    const double xi = lowrank_xi(in, B_max);
    const double nd = in.nu / d_tilde;
    const double log2e = std::log(2.0 / eps_conf);

    SlackTerms t;
    t.terms.emplace_back("entropy 6C~' xi^{nu/d}/(n^{(nu/d+1)/2}(d/nu-1)^{nu/d})",
                         6.0 * C_tilde_prime * std::pow(xi, nd) /
                             (std::pow(in.n, (nd + 1.0) / 2.0) * std::pow(d_tilde / in.nu - 1.0, nd)));
    t.terms.emplace_back("deviation sqrt(4 M^2 log(2/eps)/n)",
                         std::sqrt(4.0 * M * M * log2e / in.n));
    t.terms.emplace_back("tail 32 M log(2/eps)/(3n)", 32.0 * M * log2e / (3.0 * in.n));
    sum_terms(t);
    return t;
}

double slack_thm_main3(const LowRankInputs& in, double M, double B_max, double eps_conf,
                       double C_tilde_prime) {
    return slack_thm_main3_terms(in, M, B_max, eps_conf, C_tilde_prime).total;
}

MaureyResult maurey_sparsify(const std::vector<Matrix>& V, const std::vector<double>& a,
                             int k, RngState& rng, int max_resamples, bool stop_at_bound) {
    require(!V.empty() && V.size() == a.size(), "maurey_sparsify: need matching V and a");
    require(k >= 1, "maurey_sparsify: k must be >= 1");
    require(max_resamples >= 1, "maurey_sparsify: max_resamples must be >= 1");
    const std::size_t N = V.size();
    for (const auto& m : V)
        require(m.rows == V[0].rows && m.cols == V[0].cols,
                "maurey_sparsify: mismatched element shapes");

    double a1 = 0.0;
    for (double w : a) {
        require(w >= 0.0, "maurey_sparsify: weights must be nonnegative");
        a1 += w;
    }
    require(a1 > 0.0, "maurey_sparsify: weights must not all be zero");

    // U = sum a_l V_l and the lemma's weighted bound (||a||_1/k) sum a_l ||V_l||^2
    Matrix U(V[0].rows, V[0].cols);
    double bound_sq = 0.0;
    for (std::size_t l = 0; l < N; ++l) {
        for (std::size_t idx = 0; idx < U.data.size(); ++idx)
            U.data[idx] += a[l] * V[l].data[idx];
        const double fn = frobenius_norm(V[l]);
        bound_sq += a[l] * fn * fn;
    }
    bound_sq *= a1 / k;

    std::vector<double> cdf(N);
    std::partial_sum(a.begin(), a.end(), cdf.begin());

    MaureyResult best;
    best.bound = std::sqrt(bound_sq);
    double best_err_sq = -1.0;

    std::vector<int> counts(N);
    Matrix approx(U.rows, U.cols);
    for (int t = 0; t < max_resamples; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int draw = 0; draw < k; ++draw) {
            const double u = rng.uniform() * a1;
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            const std::size_t idx = std::min<std::size_t>(it - cdf.begin(), N - 1);
            ++counts[idx];
        }
        std::fill(approx.data.begin(), approx.data.end(), 0.0);
        const double scale = a1 / k;
        for (std::size_t l = 0; l < N; ++l) {
            if (counts[l] == 0) continue;
            const double c = scale * counts[l];
            for (std::size_t idx = 0; idx < approx.data.size(); ++idx)
                approx.data[idx] += c * V[l].data[idx];
        }
        double err_sq = 0.0;
        for (std::size_t idx = 0; idx < U.data.size(); ++idx) {
            const double d = U.data[idx] - approx.data[idx];
            err_sq += d * d;
        }
        if (best_err_sq < 0.0 || err_sq < best_err_sq) {
            best_err_sq = err_sq;
            best.counts = counts;
            best.error = std::sqrt(err_sq);
            best.resamples = t + 1;
        }
        if (stop_at_bound && best_err_sq <= bound_sq) return best;
    }
    if (stop_at_bound)
        throw std::runtime_error("maurey_sparsify: bound not met within " +
                                 std::to_string(max_resamples) + " resamples (best error " +
                                 std::to_string(best.error) + ", bound " +
                                 std::to_string(best.bound) + ")");
    return best;
}

namespace {

McEstimate summarize(const std::vector<double>& values) {
    McEstimate mc;
    const double T = static_cast<double>(values.size());
    for (double v : values) mc.estimate += v;
    mc.estimate /= T;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - mc.estimate) * (v - mc.estimate);
        mc.std_error = std::sqrt(ss / (T - 1.0)) / std::sqrt(T);
    }
    return mc;
}

}  // namespace

McEstimate rademacher_linear_exact(const Matrix& G, double B_tilde, RngState& rng,
                                   int trials) {
    require(!G.empty(), "rademacher_linear_exact: empty design");
    require(B_tilde >= 0.0, "rademacher_linear_exact: radius must be nonnegative");
    require(trials >= 1, "rademacher_linear_exact: trials must be >= 1");
    const std::size_t n = G.rows, q = G.cols;

    std::vector<double> values(trials);
    std::vector<double> acc(q);
    for (int t = 0; t < trials; ++t) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = rng.rademacher();
            const double* row = G.row(i);
            for (std::size_t j = 0; j < q; ++j) acc[j] += e * row[j];
        }
        double norm = 0.0;
        for (double v : acc) norm += v * v;
        values[t] = B_tilde * std::sqrt(norm) / static_cast<double>(n);
    }
    return summarize(values);
}

McEstimate rademacher_mc_class(const std::function<Matrix(const Matrix&)>& evaluate,
                               const Matrix& X, RngState& rng, int trials) {
    require(trials >= 1, "rademacher_mc_class: trials must be >= 1");
    const Matrix F = evaluate(X);  // candidates x n
    require(!F.empty(), "rademacher_mc_class: candidate set is empty");
    require(F.cols == X.rows, "rademacher_mc_class: evaluator returned wrong sample count");
    const std::size_t n = F.cols;

    std::vector<double> values(trials);
    std::vector<double> e(n);
    for (int t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < n; ++i) e[i] = rng.rademacher();
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < F.rows; ++c) {
            const double* row = F.row(c);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += e[i] * row[i];
            sup = std::max(sup, s);
        }
        values[t] = sup / static_cast<double>(n);
    }
    return summarize(values);
}

}  // namespace kan
