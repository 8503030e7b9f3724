#pragma once

#include <span>
#include <vector>

namespace kan {

// Uniform B-spline basis on [grid_min, grid_max]: grid_count interior
// intervals of width delta = (b-a)/G, extended by `degree` extra knots on
// each side (no repeated boundary knots, so the knot spacing is constant
// everywhere and the 2p/Delta Lipschitz formula stays meaningful).
// basis_count() = G + p functions form a partition of unity on [a,b].
struct SplineSpec {
    int degree = 3;        // p >= 0
    double grid_min = -1.0;
    double grid_max = 1.0;
    int grid_count = 5;    // G >= 1
    std::vector<double> knots;  // length G + 2p + 1, nondecreasing, uniform

    static SplineSpec make(int degree, int grid_count, double grid_min, double grid_max);

    int basis_count() const { return grid_count + degree; }
    double knot_step() const { return (grid_max - grid_min) / grid_count; }
};

// The per-edge basis of a KAN layer: optional SiLU term (index 0) followed by
// the shared spline basis. SiLU sees the raw input; spline inputs are clamped
// to [a,b] so every entry is globally Lipschitz.
struct EdgeBasis {
    SplineSpec spec;
    bool includes_silu = true;

    int total_count() const { return spec.basis_count() + (includes_silu ? 1 : 0); }
};

enum class LipschitzMode { analytic, grid };

// silu(x) = x / (1 + e^-x)
double silu(double x);
// silu'(x) = sigma(x) * (1 + x * (1 - sigma(x)))
double silu_derivative(double x);
// sup |silu'| ~= 1.0998, attained near x ~= 2.4; computed once and cached
double silu_lipschitz();

// Values of all basis functions at x; out must have length total_count().
// Entry 0 is silu(x) on the unclamped input when the basis includes it.
// Spline entries are evaluated at clamp(x, a, b), are in [0,1], and sum to 1.
void basis_eval(const EdgeBasis& basis, double x, std::span<double> out);
std::vector<double> basis_eval(const EdgeBasis& basis, double x);

// Derivatives of the (clamped) basis functions at x. Spline entries are zero
// outside [a,b]; the SiLU entry is silu'(x) on the raw input.
void basis_derivative(const EdgeBasis& basis, double x, std::span<double> out);
std::vector<double> basis_derivative(const EdgeBasis& basis, double x);

// Per-basis Lipschitz constants a_k.
//   analytic: spline entries use 2p/Delta_p with Delta_p = p * knot_step
//             (the degree-p knot span), i.e. 2/knot_step for p >= 1;
//   grid:     sup of |derivative| over a dense grid (>= 4096 points) on
//             [a,b] — never exceeds the analytic value.
// The SiLU entry is silu_lipschitz() in both modes.
std::vector<double> basis_lipschitz(const EdgeBasis& basis, LipschitzMode mode);

}  // namespace kan
