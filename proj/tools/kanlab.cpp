// kanlab: train KANs with per-epoch complexity instrumentation, evaluate the
// generalization-slack formulas, and run the built-in property checks.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kan/bounds.hpp"
#include "kan/complexity.hpp"
#include "kan/csv.hpp"
#include "kan/experiment.hpp"
#include "kan/linalg.hpp"
#include "kan/network.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    const kan::ExperimentConfig cfg = kan::load_config(config_path);
    const auto records = kan::run_experiment(cfg);
    std::printf("%zu epochs -> %s\n", records.size(), cfg.output_csv.c_str());
    if (!records.empty()) {
        const auto& last = records.back();
        std::printf("final: train %.6g  test %.6g  excess %.6g  complexity %.6g\n",
                    last.train_loss, last.test_loss, last.excess_loss, last.complexity_raw);
    }
    return 0;
}

int cmd_dropout_compare(const std::string& config_path) {
    const kan::ExperimentConfig cfg = kan::load_config(config_path);
    const auto cmp = kan::run_dropout_comparison(cfg);
    if (!cmp.ratio.empty())
        std::printf("final complexity ratio (dropout %.3g vs 0): %.6g\n", cfg.dropout_rate,
                    cmp.ratio.back());
    return 0;
}

void print_terms(const char* title, const kan::SlackTerms& t) {
    std::printf("%s\n", title);
    for (const auto& [name, value] : t.terms) std::printf("  %-55s %.10g\n", name.c_str(), value);
    std::printf("  %-55s %.10g\n", "total", t.total);
}

int cmd_bounds(const std::string& params_path) {
    std::ifstream in(params_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + params_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const nlohmann::json j = nlohmann::json::parse(ss.str());

    const double eps = j.value("eps", 0.1);

    if (j.contains("bound_inputs")) {
        const auto& b = j.at("bound_inputs");
        kan::BoundInputs in;
        in.alpha_tilde = b.value("alpha_tilde", in.alpha_tilde);
        in.d_tilde = b.value("d_tilde", in.d_tilde);
        in.p_tilde = b.value("p_tilde", in.p_tilde);
        in.n = b.value("n", in.n);
        in.M = b.value("M", in.M);
        in.B_max = b.value("B_max", in.B_max);
        in.epsilon_conf = b.value("epsilon_conf", in.epsilon_conf);
        in.tau = b.value("tau", in.tau);
        in.eta = b.value("eta", in.eta);
        in.s = b.value("s", in.s);
        in.s_prime = b.value("s_prime", in.s_prime);
        in.C_prime = b.value("C_prime", in.C_prime);
        in.C_dprime = b.value("C_dprime", in.C_dprime);

        std::printf("covering bound at eps=%g: %.10g\n\n", eps,
                    kan::covering_bound_kan(in.alpha_tilde, in.d_tilde, in.p_tilde, eps));
        print_terms("bounded-loss slack:", kan::slack_thm_main_terms(in));
        print_terms("heavy-tailed slack:", kan::slack_thm_main2_terms(in));
        if (in.s >= 2.0) print_terms("excess-risk slack:", kan::slack_excess_cor1_terms(in));
        print_terms("sub-exponential slack:", kan::slack_subexp_terms(in, in.C_prime));
        std::printf("\n");
    }
    if (j.contains("lowrank_inputs")) {
        const auto& b = j.at("lowrank_inputs");
        kan::LowRankInputs in;
        in.widths = b.at("widths").get<std::vector<int>>();
        in.ranks = b.at("ranks").get<std::vector<int>>();
        in.radii = b.at("radii").get<std::vector<double>>();
        in.rho = b.at("rho").get<std::vector<double>>();
        in.nu = b.value("nu", in.nu);
        in.C_tilde = b.value("C_tilde", in.C_tilde);
        in.n = b.value("n", in.n);
        const double M = b.value("M", 1.0);
        const double B_max = b.value("B_max", 1.0);
        const double eps_conf = b.value("epsilon_conf", 0.05);
        const double ctp = j.value("C_tilde_prime", 1.0);

        std::printf("low-rank entropy at eps=%g: %.10g\n\n", eps,
                    kan::lowrank_entropy(in, eps));
        print_terms("low-rank slack:", kan::slack_thm_main3_terms(in, M, B_max, eps_conf, ctp));
    }
    return 0;
}

int cmd_normalize(const std::string& csv_path, const std::string& excess_col,
                  const std::string& complexity_col, const std::string& out_path) {
    kan::CsvTable table = kan::read_csv(csv_path);
    const int ei = table.column_index(excess_col);
    const int ci = table.column_index(complexity_col);
    if (ei < 0) throw std::runtime_error("no column named '" + excess_col + "'");
    if (ci < 0) throw std::runtime_error("no column named '" + complexity_col + "'");

    std::vector<double> u(table.rows.size()), v(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        u[r] = kan::parse_double(table.rows[r][ei]);
        v[r] = kan::parse_double(table.rows[r][ci]);
    }
    const std::vector<double> norm = kan::normalize_series(v, u);

    table.header.push_back(complexity_col + "_normalized");
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        table.rows[r].push_back(kan::format_double(norm[r]));

    if (out_path.empty())
        std::fputs(kan::csv_to_string(table).c_str(), stdout);
    else
        kan::write_csv(table, out_path);
    return 0;
}

// quick built-in property checks: gradients vs finite differences, Maurey
// bound satisfaction, Rademacher closed form
int cmd_verify() {
    int failures = 0;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        if (!ok) ++failures;
    };

    {
        kan::RngState rng(1);
        kan::EdgeBasis basis;
        basis.spec = kan::SplineSpec::make(3, 5, -1.0, 1.0);
        double worst = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            kan::KanNetwork net = kan::init_network({4, 6, 1}, basis, 50 + rep);
            kan::Matrix X(3, 4);
            for (auto& v : X.data) v = rng.uniform(-1.0, 1.0);
            kan::Matrix up(3, 1);
            for (auto& v : up.data) v = rng.uniform(-1.0, 1.0);
            kan::ForwardTape tape;
            kan::network_forward(net, X, kan::RunMode::eval, 0.0, nullptr, &tape);
            const auto grads = kan::network_backward(net, tape, up);
            auto objective = [&](const kan::KanNetwork& c) {
                const kan::Matrix out = kan::network_forward(c, X, kan::RunMode::eval);
                double s = 0.0;
                for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * up.data[i];
                return s;
            };
            for (std::size_t l = 0; l < net.layers.size(); ++l)
                for (std::size_t idx = 0; idx < net.layers[l].weights.size(); idx += 5) {
                    kan::KanNetwork plus = net, minus = net;
                    plus.layers[l].weights[idx] += 1e-5;
                    minus.layers[l].weights[idx] -= 1e-5;
                    const double fd = (objective(plus) - objective(minus)) / 2e-5;
                    worst = std::max(worst,
                                     std::abs(grads[l][idx] - fd) / std::max(1.0, std::abs(fd)));
                }
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf), "max relative gradient error %.2e", worst);
        report("gradient-check", worst < 1e-4, buf);
    }

    {
        kan::RngState rng(2);
        int met = 0;
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<kan::Matrix> V;
            std::vector<double> a;
            for (int l = 0; l < 5; ++l) {
                kan::Matrix m(2, 3);
                for (auto& x : m.data) x = rng.normal();
                V.push_back(std::move(m));
                a.push_back(rng.uniform(0.1, 1.0));
            }
            try {
                const auto res = kan::maurey_sparsify(V, a, 16, rng, 200);
                met += res.error <= res.bound;
            } catch (const std::exception&) {
            }
        }
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d/20 instances met the lemma bound", met);
        report("maurey-bound", met == 20, buf);
    }

    {
        kan::Matrix g(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = 1.0;
        kan::RngState rng(3);
        const auto est = kan::rademacher_linear_exact(g, 1.0, rng, 10000);
        const double exact = std::sqrt(2.0) / 2.0;
        const bool ok = std::abs(est.estimate - exact) <= 3.0 * est.std_error + 1e-12;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "estimate %.9f vs exact %.9f", est.estimate, exact);
        report("rademacher-exact", ok, buf);
    }

    if (failures == 0)
        std::printf("verify: all checks passed\n");
    else
        std::printf("verify: %d checks FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KAN training and complexity toolbench"};
    app.require_subcommand(1);

    std::string config_path, params_path, csv_path, excess_col, complexity_col, out_path;

    auto* run = app.add_subcommand("run", "train a KAN and log per-epoch complexity");
    run->add_option("--config", config_path, "JSON experiment config")->required();

    auto* cmp = app.add_subcommand("dropout-compare",
                                   "run a config with and without dropout, log the ratio");
    cmp->add_option("--config", config_path, "JSON experiment config")->required();

    auto* bounds = app.add_subcommand("bounds", "evaluate the generalization-slack formulas");
    bounds->add_option("--params", params_path, "JSON bound parameters")->required();

    app.add_subcommand("verify", "run the built-in property checks");

    auto* norm = app.add_subcommand("normalize", "normalize a complexity column in a CSV");
    norm->add_option("--csv", csv_path, "input CSV")->required();
    norm->add_option("--excess-col", excess_col, "excess-loss column name")->required();
    norm->add_option("--complexity-col", complexity_col, "complexity column name")->required();
    norm->add_option("--out", out_path, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (cmp->parsed()) return cmd_dropout_compare(config_path);
        if (bounds->parsed()) return cmd_bounds(params_path);
        if (app.got_subcommand("verify")) return cmd_verify();
        if (norm->parsed()) return cmd_normalize(csv_path, excess_col, complexity_col, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
