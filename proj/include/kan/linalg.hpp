#pragma once

#include <stdexcept>
#include <string>

#include "kan/matrix.hpp"

namespace kan {

// Thrown when power iteration fails to settle within max_iter; carries the
// last estimate so callers can inspect the ill-conditioned case.
struct SpectralNormError : std::runtime_error {
    double last_estimate;
    SpectralNormError(const std::string& what, double estimate)
        : std::runtime_error(what), last_estimate(estimate) {}
};

// Largest singular value of A.
//
// min(rows,cols) <= 2 uses the closed form for the symmetric 2x2 Gram
// eigenproblem. Otherwise: power iteration on the smaller of A^T A / A A^T,
// started from a fixed seed-derived unit vector so repeated calls on the same
// matrix give the same value (layer Lipschitz bounds and the complexity
// curves built from them stay reproducible).
//
// Convergence: |sigma_k - sigma_{k-1}| <= tol * max(1, sigma_k) on three
// consecutive iterations. Rayleigh-quotient estimates converge at twice the
// eigenvector rate, which keeps the returned value within
// tol * max(1, ||A||_sigma) of the true norm.
double spectral_norm(const Matrix& a, double tol = 1e-10, int max_iter = 10000);

}  // namespace kan
