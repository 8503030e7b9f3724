#include "kan/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kan/csv.hpp"

namespace kan {

namespace {

Setup setup_from_string(const std::string& s) {
    if (s == "i") return Setup::i;
    if (s == "ii") return Setup::ii;
    if (s == "iii") return Setup::iii;
    if (s == "iv") return Setup::iv;
    if (s == "csv") return Setup::csv;
    throw std::invalid_argument("config: unknown setup '" + s + "'");
}

// Substream tags for the per-run generators.
enum : std::uint64_t { kStreamTrainData = 1, kStreamTestData = 2, kStreamInit = 3, kStreamTrainLoop = 4 };

std::string default_plot_path(const std::string& csv_path) {
    const auto dot = csv_path.find_last_of('.');
    return (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + ".gp";
}

std::string default_ratio_path(const std::string& csv_path) {
    const auto dot = csv_path.find_last_of('.');
    return (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + "_ratio.csv";
}

void write_plot_script(const ExperimentConfig& cfg) {
    const std::string path = cfg.output_plot.empty() ? default_plot_path(cfg.output_csv)
                                                     : cfg.output_plot;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("run_experiment: cannot open " + path);
    out << "# gnuplot script; run as: gnuplot -persist " << path << "\n"
        << "set datafile separator ','\n"
        << "set key top left\n"
        << "set xlabel 'epoch'\n"
        << "set title 'excess loss vs normalized complexity'\n"
        << "plot '" << cfg.output_csv << "' every ::1 using 1:4 with lines title 'excess loss', \\\n"
        << "     '" << cfg.output_csv
        << "' every ::1 using 1:6 with lines title 'complexity (normalized)'\n";
}

Matrix rows_subset(const Matrix& X, const std::vector<std::size_t>& idx, std::size_t lo,
                   std::size_t hi) {
    Matrix out(hi - lo, X.cols);
    for (std::size_t r = lo; r < hi; ++r)
        std::copy(X.row(idx[r]), X.row(idx[r]) + X.cols, out.row(r - lo));
    return out;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

    static const std::set<std::string> known = {
        "setup",       "shape",          "spline",          "lr",
        "momentum",    "batch_size",     "epochs",          "dropout_rate",
        "n_train",     "n_test",         "seed",            "lipschitz_mode",
        "complexity_mode", "output_csv", "output_plot",     "checkpoint_path",
        "ratio_csv",   "train_csv",      "test_csv",        "label_column"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

    ExperimentConfig cfg;
    cfg.setup = setup_from_string(j.at("setup").get<std::string>());
    cfg.shape = j.at("shape").get<std::vector<int>>();
    if (j.contains("spline")) {
        const auto& sp = j.at("spline");
        static const std::set<std::string> spline_keys = {"p", "G", "a", "b"};
        for (const auto& [key, value] : sp.items())
            if (!spline_keys.count(key))
                throw std::invalid_argument("config: unknown spline key '" + key + "'");
        cfg.spline.p = sp.value("p", cfg.spline.p);
        cfg.spline.G = sp.value("G", cfg.spline.G);
        cfg.spline.a = sp.value("a", cfg.spline.a);
        cfg.spline.b = sp.value("b", cfg.spline.b);
    }
    cfg.lr = j.value("lr", cfg.lr);
    cfg.momentum = j.value("momentum", cfg.momentum);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.dropout_rate = j.value("dropout_rate", cfg.dropout_rate);
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.n_test = j.value("n_test", cfg.n_test);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("lipschitz_mode")) {
        const std::string m = j.at("lipschitz_mode").get<std::string>();
        if (m == "analytic")
            cfg.lipschitz_mode = LipschitzMode::analytic;
        else if (m == "grid")
            cfg.lipschitz_mode = LipschitzMode::grid;
        else
            throw std::invalid_argument("config: unknown lipschitz_mode '" + m + "'");
    }
    if (j.contains("complexity_mode")) {
        const std::string m = j.at("complexity_mode").get<std::string>();
        if (m == "section3")
            cfg.complexity_mode = ComplexityMode::section3;
        else if (m == "r_kan")
            cfg.complexity_mode = ComplexityMode::r_kan;
        else
            throw std::invalid_argument("config: unknown complexity_mode '" + m + "'");
    }
    cfg.output_csv = j.value("output_csv", cfg.output_csv);
    cfg.output_plot = j.value("output_plot", cfg.output_plot);
    cfg.checkpoint_path = j.value("checkpoint_path", cfg.checkpoint_path);
    cfg.ratio_csv = j.value("ratio_csv", cfg.ratio_csv);
    cfg.train_csv = j.value("train_csv", cfg.train_csv);
    cfg.test_csv = j.value("test_csv", cfg.test_csv);
    cfg.label_column = j.value("label_column", cfg.label_column);

    if (cfg.shape.size() < 2) throw std::invalid_argument("config: shape needs >= 2 entries");
    if (cfg.setup != Setup::csv) {
        if (cfg.shape.front() != setup_input_dim(cfg.setup))
            throw std::invalid_argument("config: shape[0] must match the setup input dimension");
        if (cfg.shape.back() != 1)
            throw std::invalid_argument("config: shape must end in 1 for setups i-iv");
    } else if (cfg.train_csv.empty() || cfg.label_column.empty()) {
        throw std::invalid_argument("config: csv setup needs train_csv and label_column");
    }
    if (cfg.batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (cfg.epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw std::invalid_argument("config: dropout_rate must be in [0,1)");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

std::string records_to_csv(const std::vector<EpochRecord>& records, int layer_count) {
    CsvTable table;
    table.header = {"epoch",          "train_loss", "test_loss", "excess_loss",
                    "complexity_raw", "complexity_normalized",   "rho_prod",
                    "sum_BC23",       "D"};
    for (int l = 1; l <= layer_count; ++l) {
        table.header.push_back("B_" + std::to_string(l));
        table.header.push_back("c_" + std::to_string(l));
        table.header.push_back("rho_" + std::to_string(l));
    }
    for (const auto& r : records) {
        std::vector<std::string> row = {std::to_string(r.epoch),
                                        format_double(r.train_loss),
                                        format_double(r.test_loss),
                                        format_double(r.excess_loss),
                                        format_double(r.complexity_raw),
                                        format_double(r.complexity_normalized),
                                        format_double(r.rho_prod),
                                        format_double(r.sum_BC23),
                                        format_double(r.D)};
        for (const auto& st : r.layers) {
            row.push_back(format_double(st.B_l));
            row.push_back(format_double(st.c_l));
            row.push_back(format_double(st.rho_l));
        }
        table.rows.push_back(std::move(row));
    }
    return csv_to_string(table);
}

void write_records_csv(const std::vector<EpochRecord>& records, int layer_count,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_records_csv: cannot open " + path);
    out << records_to_csv(records, layer_count);
}

namespace {

struct RunData {
    Dataset train;
    Dataset test;
};

RunData load_run_data(const ExperimentConfig& cfg) {
    RunData data;
    if (cfg.setup == Setup::csv) {
        data.train = load_feature_csv(cfg.train_csv, cfg.label_column);
        data.test = cfg.test_csv.empty() ? data.train
                                         : load_feature_csv(cfg.test_csv, cfg.label_column);
        if (static_cast<int>(data.train.X.cols) != cfg.shape.front())
            throw std::invalid_argument("config: shape[0] must match the CSV feature count");
        const int want = data.train.task == Task::multiclass ? data.train.class_count : 1;
        if (cfg.shape.back() != want)
            throw std::invalid_argument("config: shape must end in " + std::to_string(want) +
                                        " for this CSV task");
    } else {
        data.train = make_dataset(cfg.setup, cfg.n_train, derive_seed(cfg.seed, kStreamTrainData));
        data.test = make_dataset(cfg.setup, cfg.n_test, derive_seed(cfg.seed, kStreamTestData));
    }
    return data;
}

}  // namespace

std::vector<EpochRecord> run_experiment(const ExperimentConfig& cfg) {
    const int layer_count = static_cast<int>(cfg.shape.size()) - 1;
    if (cfg.epochs == 0) {
        write_records_csv({}, layer_count, cfg.output_csv);
        write_plot_script(cfg);
        return {};
    }

    const RunData data = load_run_data(cfg);
    const double D = frobenius_norm(data.train.X);

    EdgeBasis basis;
    basis.spec = SplineSpec::make(cfg.spline.p, cfg.spline.G, cfg.spline.a, cfg.spline.b);
    KanNetwork net = init_network(cfg.shape, basis, derive_seed(cfg.seed, kStreamInit));

    RngState loop_rng(derive_seed(cfg.seed, kStreamTrainLoop));
    GradientSet velocity;
    ForwardTape tape;

    const std::size_t n = data.train.X.rows;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochRecord> records;
    records.reserve(cfg.epochs);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        // Fisher-Yates shuffle from the loop generator
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[loop_rng.uniform_index(i + 1)]);

        for (std::size_t lo = 0; lo < n; lo += cfg.batch_size) {
            const std::size_t hi = std::min(n, lo + cfg.batch_size);
            const Matrix Xb = rows_subset(data.train.X, order, lo, hi);
            std::vector<double> yb(hi - lo);
            for (std::size_t r = lo; r < hi; ++r) yb[r - lo] = data.train.y[order[r]];

            const Matrix pred = network_forward(net, Xb, RunMode::train, cfg.dropout_rate,
                                                &loop_rng, &tape);
            const LossResult lr = loss_and_grad(data.train.task, pred, yb);
            if (!std::isfinite(lr.loss))
                throw std::runtime_error("run_experiment: non-finite loss at epoch " +
                                         std::to_string(epoch));
            const GradientSet grads = network_backward(net, tape, lr.grad);
            sgd_step(net, grads, cfg.lr, cfg.momentum, velocity);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        const Matrix train_pred = network_forward(net, data.train.X, RunMode::eval);
        const Matrix test_pred = network_forward(net, data.test.X, RunMode::eval);
        rec.train_loss = loss_and_grad(data.train.task, train_pred, data.train.y).loss;
        rec.test_loss = loss_and_grad(data.test.task, test_pred, data.test.y).loss;
        if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.test_loss))
            throw std::runtime_error("run_experiment: non-finite loss at epoch " +
                                     std::to_string(epoch));
        rec.excess_loss = rec.test_loss - rec.train_loss;

        const ComplexityReport rep = complexity_report(net, D, cfg.lipschitz_mode);
        rec.complexity_raw = (cfg.complexity_mode == ComplexityMode::section3) ? rep.measure
                                                                               : rep.r_kan;
        rec.rho_prod = 1.0;
        rec.sum_BC23 = 0.0;
        for (const auto& st : rep.layer_stats) {
            rec.rho_prod *= st.rho_l;
            rec.sum_BC23 += std::cbrt(st.B_l * st.c_l * st.B_l * st.c_l);
        }
        rec.D = D;
        rec.layers = rep.layer_stats;
        records.push_back(std::move(rec));
    }

    // Scale the raw complexity series so its max equals the final excess
    // loss; a constant series maps to zeros.
    std::vector<double> raw(records.size()), excess(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        raw[i] = records[i].complexity_raw;
        excess[i] = records[i].excess_loss;
    }
    try {
        const std::vector<double> norm = normalize_series(raw, excess);
        for (std::size_t i = 0; i < records.size(); ++i)
            records[i].complexity_normalized = norm[i];
    } catch (const std::invalid_argument&) {
        for (auto& r : records) r.complexity_normalized = 0.0;
    }

    write_records_csv(records, layer_count, cfg.output_csv);
    write_plot_script(cfg);
    if (!cfg.checkpoint_path.empty())
        save_checkpoint(net, cfg.seed, cfg.epochs, cfg.checkpoint_path);
    return records;
}

DropoutComparison run_dropout_comparison(const ExperimentConfig& cfg) {
    ExperimentConfig reg = cfg;
    ExperimentConfig base = cfg;
    base.dropout_rate = 0.0;

    const std::string stem = cfg.output_csv;
    const auto dot = stem.find_last_of('.');
    const std::string prefix = dot == std::string::npos ? stem : stem.substr(0, dot);
    reg.output_csv = prefix + "_dropout.csv";
    reg.output_plot = prefix + "_dropout.gp";
    base.output_csv = prefix + "_baseline.csv";
    base.output_plot = prefix + "_baseline.gp";

    DropoutComparison cmp;
    cmp.regularized = run_experiment(reg);
    cmp.baseline = run_experiment(base);

    cmp.ratio.resize(cmp.regularized.size());
    for (std::size_t i = 0; i < cmp.ratio.size(); ++i)
        cmp.ratio[i] = cmp.regularized[i].complexity_raw / cmp.baseline[i].complexity_raw;

    CsvTable table;
    table.header = {"epoch", "complexity_regularized", "complexity_baseline", "ratio"};
    for (std::size_t i = 0; i < cmp.ratio.size(); ++i)
        table.rows.push_back({std::to_string(cmp.regularized[i].epoch),
                              format_double(cmp.regularized[i].complexity_raw),
                              format_double(cmp.baseline[i].complexity_raw),
                              format_double(cmp.ratio[i])});
    write_csv(table, cfg.ratio_csv.empty() ? default_ratio_path(cfg.output_csv) : cfg.ratio_csv);
    return cmp;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson_correlation: need two equal series of length >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson_correlation: constant series");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace kan
