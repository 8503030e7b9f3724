#include "kan/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "kan/rng.hpp"

namespace kan {

namespace {

// Fixed sub-seed for the power-iteration start vector.
constexpr std::uint64_t kStartVectorSeed = 0xC0FFEE5EEDULL;

double sym2x2_max_eig(double a, double b, double c) {
    // eigenvalues of [[a,b],[b,c]]
    const double tr = a + c;
    const double disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
    return 0.5 * (tr + disc);
}

}  // namespace

double spectral_norm(const Matrix& a, double tol, int max_iter) {
    if (a.empty()) throw std::invalid_argument("spectral_norm: empty matrix");
    if (!(tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be positive");
    if (max_iter <= 0) throw std::invalid_argument("spectral_norm: max_iter must be positive");

    const std::size_t m = std::min(a.rows, a.cols);
    if (m == 1) {
        // row or column vector: largest singular value is the Euclidean norm
        return frobenius_norm(a);
    }

    const Matrix b = (a.cols <= a.rows) ? gram(a) : outer_gram(a);
    if (m == 2) {
        const double lmax = sym2x2_max_eig(b(0, 0), b(0, 1), b(1, 1));
        return std::sqrt(std::max(lmax, 0.0));
    }

    RngState rng(kStartVectorSeed);
    std::vector<double> v(m);
    double nv = 0.0;
    for (auto& x : v) {
        x = rng.normal();
        nv += x * x;
    }
    nv = std::sqrt(nv);
    for (auto& x : v) x /= nv;

    double sigma = 0.0;
    double prev = -1.0;
    int stable = 0;
    for (int it = 0; it < max_iter; ++it) {
        const std::vector<double> w = matvec(b, v);
        double lambda = 0.0, nw = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lambda += v[i] * w[i];
            nw += w[i] * w[i];
        }
        nw = std::sqrt(nw);
        sigma = std::sqrt(std::max(lambda, 0.0));
        if (nw == 0.0) return 0.0;  // v is in the kernel of a PSD matrix: norm 0
        for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / nw;

        if (std::abs(sigma - prev) <= tol * std::max(1.0, sigma)) {
            if (++stable >= 3) return sigma;
        } else {
            stable = 0;
        }
        prev = sigma;
    }
    throw SpectralNormError("spectral_norm: no convergence after " +
                                std::to_string(max_iter) + " iterations",
                            sigma);
}

}  // namespace kan
