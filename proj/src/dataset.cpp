#include "kan/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "kan/csv.hpp"

namespace kan {

namespace {
const double kPi = std::acos(-1.0);
const double kNoiseVar = std::log(1.04);
const double kNoiseMean = -0.5 * kNoiseVar;
}  // namespace

double f1(std::span<const double> x) {
    if (x.size() != 4) throw std::invalid_argument("f1: needs exactly 4 inputs");
    return std::exp(0.5 * (std::sin(kPi * (x[0] * x[0] + x[1] * x[1])) +
                           std::sin(kPi * (x[2] * x[2] + x[3] * x[3]))));
}

double f2(std::span<const double> x) {
    if (x.size() != 100) throw std::invalid_argument("f2: needs exactly 100 inputs");
    double sum = 0.0;
    for (double xi : x) {
        const double s = std::sin(kPi * xi / 2.0);
        sum += s * s;
    }
    return std::exp(sum / 100.0);
}

int setup_input_dim(Setup s) {
    switch (s) {
        case Setup::i:
        case Setup::iii:
            return 4;
        case Setup::ii:
        case Setup::iv:
            return 100;
        case Setup::csv:
            return 0;
    }
    return 0;
}

bool setup_is_classification(Setup s) { return s == Setup::iii || s == Setup::iv; }

double classification_prob(Setup s, std::span<const double> x) {
    if (s == Setup::iii) return 1.0 / (1.0 + f1(x));
    if (s == Setup::iv) return 1.0 / (1.0 + f2(x));
    throw std::invalid_argument("classification_prob: setup has no label model");
}

double draw_target(Setup s, std::span<const double> x, RngState& rng) {
    switch (s) {
        case Setup::i:
            return f1(x) * std::exp(kNoiseMean + std::sqrt(kNoiseVar) * rng.normal());
        case Setup::ii:
            return f2(x) * std::exp(kNoiseMean + std::sqrt(kNoiseVar) * rng.normal());
        case Setup::iii:
        case Setup::iv:
            return rng.bernoulli(classification_prob(s, x)) ? 1.0 : 0.0;
        case Setup::csv:
            break;
    }
    throw std::invalid_argument("draw_target: csv datasets are loaded, not generated");
}

Dataset make_dataset(Setup s, std::size_t n, std::uint64_t seed) {
    if (s == Setup::csv)
        throw std::invalid_argument("make_dataset: csv datasets are loaded, not generated");
    if (n < 1) throw std::invalid_argument("make_dataset: n must be >= 1");

    const int d = setup_input_dim(s);
    RngState rng(seed);
    Dataset ds;
    ds.X = Matrix(n, d);
    for (auto& v : ds.X.data) v = rng.uniform(-1.0, 1.0);
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ds.y[i] = draw_target(s, std::span<const double>(ds.X.row(i), d), rng);
    ds.task = setup_is_classification(s) ? Task::binary : Task::regression;
    return ds;
}

Dataset load_feature_csv(const std::string& path, const std::string& label_column) {
    const CsvTable table = read_csv(path);
    const int label_idx = table.column_index(label_column);
    if (label_idx < 0)
        throw std::runtime_error("load_feature_csv: " + path + ": no column named '" +
                                 label_column + "'");
    if (table.header.size() < 2)
        throw std::runtime_error("load_feature_csv: " + path + ": no feature columns");
    if (table.rows.empty()) throw std::runtime_error("load_feature_csv: " + path + ": no rows");

    const std::size_t n = table.rows.size();
    const std::size_t d = table.header.size() - 1;
    Dataset ds;
    ds.X = Matrix(n, d);
    ds.y.resize(n);

    bool all_integer = true;
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t fi = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            double v;
            try {
                v = parse_double(table.rows[r][c]);
            } catch (const std::exception&) {
                throw std::runtime_error("load_feature_csv: " + path + " line " +
                                         std::to_string(r + 2) + ", column '" + table.header[c] +
                                         "': non-numeric cell '" + table.rows[r][c] + "'");
            }
            if (!std::isfinite(v))
                throw std::runtime_error("load_feature_csv: " + path + " line " +
                                         std::to_string(r + 2) + ", column '" + table.header[c] +
                                         "': non-finite value");
            if (static_cast<int>(c) == label_idx) {
                ds.y[r] = v;
                if (v != std::floor(v) || v < 0.0) all_integer = false;
            } else {
                ds.X(r, fi++) = v;
            }
        }
    }

    if (all_integer) {
        ds.task = Task::multiclass;
        double mx = 0.0;
        for (double v : ds.y) mx = std::max(mx, v);
        ds.class_count = static_cast<int>(mx) + 1;
    } else {
        ds.task = Task::regression;
    }
    return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::string& label_column) {
    CsvTable table;
    for (std::size_t j = 0; j < ds.X.cols; ++j) table.header.push_back("f" + std::to_string(j));
    table.header.push_back(label_column);
    table.rows.reserve(ds.X.rows);
    for (std::size_t i = 0; i < ds.X.rows; ++i) {
        std::vector<std::string> row;
        row.reserve(ds.X.cols + 1);
        for (std::size_t j = 0; j < ds.X.cols; ++j) row.push_back(format_double(ds.X(i, j)));
        row.push_back(format_double(ds.y[i]));
        table.rows.push_back(std::move(row));
    }
    write_csv(table, path);
}

LossResult loss_and_grad(Task task, const Matrix& pred, const std::vector<double>& y) {
    if (pred.rows != y.size()) throw std::invalid_argument("loss_and_grad: sample count mismatch");
    const double n = static_cast<double>(pred.rows);
    LossResult res;
    res.grad = Matrix(pred.rows, pred.cols);

    switch (task) {
        case Task::regression: {
            if (pred.cols != 1) throw std::invalid_argument("loss_and_grad: regression needs 1 output");
            for (std::size_t i = 0; i < pred.rows; ++i) {
                const double r = pred(i, 0) - y[i];
                res.loss += r * r;
                res.grad(i, 0) = 2.0 * r / n;
            }
            res.loss /= n;
            return res;
        }
        case Task::binary: {
            if (pred.cols != 1) throw std::invalid_argument("loss_and_grad: binary needs 1 logit");
            for (std::size_t i = 0; i < pred.rows; ++i) {
                const double z = pred(i, 0);
                // log(1+e^z) - y z, evaluated stably
                res.loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y[i] * z;
                const double sig = 1.0 / (1.0 + std::exp(-z));
                res.grad(i, 0) = (sig - y[i]) / n;
            }
            res.loss /= n;
            return res;
        }
        case Task::multiclass: {
            const std::size_t C = pred.cols;
            if (C < 2) throw std::invalid_argument("loss_and_grad: multiclass needs >= 2 logits");
            for (std::size_t i = 0; i < pred.rows; ++i) {
                const int cls = static_cast<int>(y[i]);
                if (cls < 0 || cls >= static_cast<int>(C))
                    throw std::invalid_argument("loss_and_grad: class index out of range");
                const double* z = pred.row(i);
                double zmax = z[0];
                for (std::size_t c = 1; c < C; ++c) zmax = std::max(zmax, z[c]);
                double lse = 0.0;
                for (std::size_t c = 0; c < C; ++c) lse += std::exp(z[c] - zmax);
                lse = zmax + std::log(lse);
                res.loss += lse - z[cls];
                for (std::size_t c = 0; c < C; ++c) {
                    const double p = std::exp(z[c] - lse);
                    res.grad(i, c) = (p - (static_cast<int>(c) == cls ? 1.0 : 0.0)) / n;
                }
            }
            res.loss /= n;
            return res;
        }
    }
    throw std::logic_error("loss_and_grad: unknown task");
}

}  // namespace kan
