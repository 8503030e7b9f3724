#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kan/complexity.hpp"
#include "kan/dataset.hpp"
#include "kan/network.hpp"

namespace kan {

struct SplineConfig {
    int p = 3;
    int G = 5;
    double a = -1.0;
    double b = 1.0;
};

// Everything a run needs; parsed from a flat snake_case JSON object with
// exactly these keys (unknown keys are rejected). See README for the file
// format.
struct ExperimentConfig {
    Setup setup = Setup::i;
    std::vector<int> shape;
    SplineConfig spline;
    double lr = 1e-2;
    double momentum = 0.0;
    int batch_size = 64;
    int epochs = 200;
    double dropout_rate = 0.0;
    std::size_t n_train = 2000;
    std::size_t n_test = 2000;
    std::uint64_t seed = 0;
    LipschitzMode lipschitz_mode = LipschitzMode::grid;
    ComplexityMode complexity_mode = ComplexityMode::section3;
    std::string output_csv = "run.csv";
    std::string output_plot;     // default: output_csv with .gp extension
    std::string checkpoint_path; // optional final-epoch checkpoint
    std::string ratio_csv;       // dropout comparison output; default derived
    std::string train_csv;       // csv setup only
    std::string test_csv;        // csv setup only
    std::string label_column;    // csv setup only
};

ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// One CSV row. excess_loss is test_loss - train_loss by construction.
struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double excess_loss = 0.0;
    double complexity_raw = 0.0;
    double complexity_normalized = 0.0;
    double rho_prod = 0.0;
    double sum_BC23 = 0.0;
    double D = 0.0;
    std::vector<LayerStats> layers;
};

// Column order: epoch, train_loss, test_loss, excess_loss, complexity_raw,
// complexity_normalized, rho_prod, sum_BC23, D, then B_l, c_l, rho_l per
// layer. Header row always present.
std::string records_to_csv(const std::vector<EpochRecord>& records, int layer_count);
void write_records_csv(const std::vector<EpochRecord>& records, int layer_count,
                       const std::string& path);

// Minibatch SGD with one complexity snapshot per epoch (eval mode, end of
// epoch). Writes the CSV, a standalone gnuplot script, and optionally a
// final checkpoint. A non-finite training loss aborts with the epoch number.
std::vector<EpochRecord> run_experiment(const ExperimentConfig& cfg);

struct DropoutComparison {
    std::vector<double> ratio;  // per-epoch regularized/baseline complexity
    std::vector<EpochRecord> regularized;
    std::vector<EpochRecord> baseline;
};

// Runs the config twice, with its dropout_rate and with 0, identical seeds,
// and writes the per-epoch complexity ratio CSV.
DropoutComparison run_dropout_comparison(const ExperimentConfig& cfg);

// Sample Pearson correlation; NaN-free inputs, length >= 2.
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kan
