// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kan/matrix.hpp"

namespace oracle {

// Largest eigenvalue of a symmetric matrix by the cyclic Jacobi rotation
// method. Used as the singular-value oracle via sqrt(lambda_max(A^T A)).
inline double jacobi_max_eigenvalue(kan::Matrix m, int sweeps = 100) {
    if (m.rows != m.cols) throw std::invalid_argument("jacobi: square matrix required");
    const std::size_t n = m.rows;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
    }
    double lmax = m(0, 0);
    for (std::size_t i = 1; i < n; ++i) lmax = std::max(lmax, m(i, i));
    return lmax;
}

inline double spectral_norm_oracle(const kan::Matrix& a) {
    const kan::Matrix g = (a.cols <= a.rows) ? kan::gram(a) : kan::outer_gram(a);
    return std::sqrt(std::max(jacobi_max_eigenvalue(g), 0.0));
}

// Textbook Cox-de Boor recursion, one basis function at a time. The right
// boundary of the outermost interval covering [a,b] is closed so the basis
// sums to 1 on the whole interval.
inline double cox_de_boor(const std::vector<double>& t, int k, int p, double x,
                          int closed_interval) {
    if (p == 0) {
        if (k == closed_interval) return (t[k] <= x && x <= t[k + 1]) ? 1.0 : 0.0;
        if (k > closed_interval) return (t[k] < x && x < t[k + 1]) ? 1.0 : 0.0;
        return (t[k] <= x && x < t[k + 1]) ? 1.0 : 0.0;
    }
    double left = 0.0, right = 0.0;
    if (t[k + p] != t[k])
        left = (x - t[k]) / (t[k + p] - t[k]) * cox_de_boor(t, k, p - 1, x, closed_interval);
    if (t[k + p + 1] != t[k + 1])
        right = (t[k + p + 1] - x) / (t[k + p + 1] - t[k + 1]) *
                cox_de_boor(t, k + 1, p - 1, x, closed_interval);
    return left + right;
}

// All basis values of a uniform spec evaluated naively.
inline std::vector<double> naive_spline_values(int p, int G, double a, double b, double x) {
    const double delta = (b - a) / G;
    std::vector<double> t(G + 2 * p + 1);
    for (int i = 0; i < static_cast<int>(t.size()); ++i) t[i] = a + (i - p) * delta;
    x = std::min(std::max(x, a), b);
    const int closed = G + p - 1;  // knot index of the last interior interval
    std::vector<double> out(G + p);
    for (int k = 0; k < G + p; ++k) out[k] = cox_de_boor(t, k, p, x, closed);
    return out;
}

// Central finite difference.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Least-squares slope of y over x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace oracle
