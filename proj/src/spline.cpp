#include "kan/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kan {

namespace {

double clamp_to_grid(const SplineSpec& s, double x) {
    return std::clamp(x, s.grid_min, s.grid_max);
}

// Interior interval index of clamped x, in [0, G-1]. The right endpoint is
// folded into the last interval so the basis sums to 1 on all of [a,b].
int interval_index(const SplineSpec& s, double x) {
    const int j = static_cast<int>(std::floor((x - s.grid_min) / s.knot_step()));
    return std::clamp(j, 0, s.grid_count - 1);
}

// Cox-de Boor triangle: values of the p+1 nonzero degree-`deg` functions at x,
// where `knot` is the knot index with t_knot <= x <= t_knot+1. Writes
// n[0..deg]; basis function (knot - deg + r) gets n[r].
void deboor_triangle(const std::vector<double>& t, int knot, int deg, double x, double* n) {
    n[0] = 1.0;
    for (int j = 1; j <= deg; ++j) {
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double left = x - t[knot + r + 1 - j];
            const double right = t[knot + r + 1] - x;
            const double temp = n[r] / (right + left);
            n[r] = saved + right * temp;
            saved = left * temp;
        }
        n[j] = saved;
    }
}

constexpr int kMaxDegree = 16;

void spline_values(const SplineSpec& s, double x, double* out) {
    const int p = s.degree;
    const int nb = s.basis_count();
    std::fill(out, out + nb, 0.0);
    const double xc = clamp_to_grid(s, x);
    const int knot = interval_index(s, xc) + p;  // t_knot <= xc <= t_knot+1
    double n[kMaxDegree + 1];
    deboor_triangle(s.knots, knot, p, xc, n);
    for (int r = 0; r <= p; ++r) out[knot - p + r] = n[r];
}

void spline_derivatives(const SplineSpec& s, double x, double* out) {
    const int p = s.degree;
    const int nb = s.basis_count();
    std::fill(out, out + nb, 0.0);
    if (p == 0) return;                       // piecewise constant
    if (x < s.grid_min || x > s.grid_max) return;  // clamped: flat outside

    const int knot = interval_index(s, x) + p;
    // degree p-1 values on the same knot vector; nonzero for functions
    // (knot-p+1) .. knot of that family
    double low[kMaxDegree + 1];
    deboor_triangle(s.knots, knot, p - 1, x, low);

    // B'_{k,p} = p * (B_{k,p-1}/(t_{k+p}-t_k) - B_{k+1,p-1}/(t_{k+p+1}-t_{k+1}))
    const auto& t = s.knots;
    for (int k = knot - p; k <= knot; ++k) {
        double d = 0.0;
        if (k >= knot - p + 1) d += low[k - (knot - p + 1)] / (t[k + p] - t[k]);
        if (k + 1 <= knot) d -= low[k + 1 - (knot - p + 1)] / (t[k + p + 1] - t[k + 1]);
        out[k] = p * d;
    }
}

}  // namespace

SplineSpec SplineSpec::make(int degree, int grid_count, double grid_min, double grid_max) {
    if (degree < 0) throw std::invalid_argument("SplineSpec: degree must be >= 0");
    if (degree > kMaxDegree) throw std::invalid_argument("SplineSpec: degree too large");
    if (grid_count < 1) throw std::invalid_argument("SplineSpec: grid_count must be >= 1");
    if (!(grid_min < grid_max)) throw std::invalid_argument("SplineSpec: need grid_min < grid_max");

    SplineSpec s;
    s.degree = degree;
    s.grid_count = grid_count;
    s.grid_min = grid_min;
    s.grid_max = grid_max;
    const double delta = (grid_max - grid_min) / grid_count;
    s.knots.resize(grid_count + 2 * degree + 1);
    for (int i = 0; i < static_cast<int>(s.knots.size()); ++i)
        s.knots[i] = grid_min + (i - degree) * delta;
    return s;
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_derivative(double x) {
    const double sig = 1.0 / (1.0 + std::exp(-x));
    return sig * (1.0 + x * (1.0 - sig));
}

double silu_lipschitz() {
    // golden-section maximization of silu' on [0,8]; the maximizer is unique
    static const double value = [] {
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = 0.0, hi = 8.0;
        double c = hi - gr * (hi - lo);
        double d = lo + gr * (hi - lo);
        while (hi - lo > 1e-12) {
            if (silu_derivative(c) > silu_derivative(d)) {
                hi = d;
            } else {
                lo = c;
            }
            c = hi - gr * (hi - lo);
            d = lo + gr * (hi - lo);
        }
        return silu_derivative(0.5 * (lo + hi));
    }();
    return value;
}

void basis_eval(const EdgeBasis& basis, double x, std::span<double> out) {
    if (static_cast<int>(out.size()) != basis.total_count())
        throw std::invalid_argument("basis_eval: output span size mismatch");
    double* p = out.data();
    if (basis.includes_silu) *p++ = silu(x);
    spline_values(basis.spec, x, p);
}

std::vector<double> basis_eval(const EdgeBasis& basis, double x) {
    std::vector<double> out(basis.total_count());
    basis_eval(basis, x, out);
    return out;
}

void basis_derivative(const EdgeBasis& basis, double x, std::span<double> out) {
    if (static_cast<int>(out.size()) != basis.total_count())
        throw std::invalid_argument("basis_derivative: output span size mismatch");
    double* p = out.data();
    if (basis.includes_silu) *p++ = silu_derivative(x);
    spline_derivatives(basis.spec, x, p);
}

std::vector<double> basis_derivative(const EdgeBasis& basis, double x) {
    std::vector<double> out(basis.total_count());
    basis_derivative(basis, x, out);
    return out;
}

std::vector<double> basis_lipschitz(const EdgeBasis& basis, LipschitzMode mode) {
    const SplineSpec& s = basis.spec;
    const double delta = s.knot_step();
    if (!(delta > 0.0)) throw std::invalid_argument("basis_lipschitz: degenerate knot spacing");

    std::vector<double> out(basis.total_count(), 0.0);
    std::size_t base = 0;
    if (basis.includes_silu) {
        out[0] = silu_lipschitz();
        base = 1;
    }

    const int nb = s.basis_count();
    if (mode == LipschitzMode::analytic) {
        // 2p / Delta_p with Delta_p = max_j(xi_{j+p} - xi_j) = p * delta
        const double bound = (s.degree == 0) ? 0.0 : 2.0 * s.degree / (s.degree * delta);
        for (int k = 0; k < nb; ++k) out[base + k] = bound;
        return out;
    }

    // grid mode: sup |B'_k| over a dense grid on [a,b]
    const int points = 4097;
    std::vector<double> deriv(nb);
    const double step = (s.grid_max - s.grid_min) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = s.grid_min + i * step;
        spline_derivatives(s, x, deriv.data());
        for (int k = 0; k < nb; ++k) out[base + k] = std::max(out[base + k], std::abs(deriv[k]));
    }
    return out;
}

}  // namespace kan
