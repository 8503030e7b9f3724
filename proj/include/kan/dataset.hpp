#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kan/matrix.hpp"
#include "kan/rng.hpp"

namespace kan {

enum class Task { regression, binary, multiclass };

struct Dataset {
    Matrix X;
    std::vector<double> y;  // targets, or class indices for classification
    Task task = Task::regression;
    int class_count = 0;  // multiclass only
};

// Synthetic generators and the four benchmark setups. Inputs are iid
// Unif(-1,1); regression targets are f * exp(eps) with
// eps ~ N(-log(1.04)/2, log(1.04)), chosen so exp(eps) has mean 1 and
// standard deviation 0.2; classification labels are Bernoulli with
// P(y=1) = 1/(1+f).
enum class Setup { i, ii, iii, iv, csv };

double f1(std::span<const double> x);  // 4 inputs
double f2(std::span<const double> x);  // exactly 100 inputs

int setup_input_dim(Setup s);  // 4 or 100; csv returns 0 (file-derived)
bool setup_is_classification(Setup s);

// P(y=1 | x) for setups iii/iv.
double classification_prob(Setup s, std::span<const double> x);

// Draw one label/target given the already-sampled input row. Factored out so
// conditional label statistics can be probed at a fixed x.
double draw_target(Setup s, std::span<const double> x, RngState& rng);

// X is filled first (row-major), then targets row by row, all from one
// generator, so a seed pins the dataset bit-for-bit.
Dataset make_dataset(Setup s, std::size_t n, std::uint64_t seed);

// Rectangular numeric CSV with a header; the named column becomes y, every
// other column a feature. All-integer labels make a multiclass dataset with
// classes 0..max; anything else is treated as regression targets.
Dataset load_feature_csv(const std::string& path, const std::string& label_column);

// Inverse of load_feature_csv (features f0..f{d-1} unless the dataset came
// with names). Doubles are written in shortest round-trip form.
void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::string& label_column);

struct LossResult {
    double loss = 0.0;
    Matrix grad;  // dLoss/dpred, same shape as pred
};

// regression: mean squared error over all samples;
// binary: sigmoid cross-entropy on a single logit column;
// multiclass: softmax cross-entropy, y holds class indices.
// Gradients are analytic and already averaged by n.
LossResult loss_and_grad(Task task, const Matrix& pred, const std::vector<double>& y);

}  // namespace kan
