// Command-line experiment runner: replicated GA runs, scaling studies over n,
// static-lambda grids, update-strength sweeps, Monte-Carlo validators for the
// phase success bounds, and log-log slope fits over existing result files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "llga/experiment.hpp"
#include "llga/oracles.hpp"
#include "llga/version.hpp"

using namespace llga;

namespace {

void print_rows(const std::vector<SummaryRow>& rows, SummaryCsvStyle style) {
    write_summary_csv(std::cout, rows, style);
}

struct OracleRow {
    std::string check;
    int n = 0;
    int d = 0;
    int lambda = 0;
    int ell = 0;
    std::int64_t samples = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double analytic = 0.0;
    bool pass = false;
};

void write_oracle_csv(std::ostream& os, const std::vector<OracleRow>& rows) {
    os << "check,n,d,lambda,ell,samples,estimate,std_error,lower_3sigma,upper_3sigma,"
          "analytic_bound,pass\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%d,%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n",
                      r.check.c_str(), r.n, r.d, r.lambda, r.ell,
                      static_cast<long long>(r.samples), r.estimate, r.std_error,
                      r.estimate - 3 * r.std_error, r.estimate + 3 * r.std_error, r.analytic,
                      r.pass ? 1 : 0);
        os << buf;
    }
}

std::vector<OracleRow> run_oracle_battery(const std::string& check, int n,
                                          std::int64_t samples, std::uint64_t seed) {
    std::vector<OracleRow> rows;
    Rng rng(seed);
    const bool all = check == "all";

    if (all || check == "mutation-bound") {
        for (const auto& cell : default_mutation_cells()) {
            const auto res = verify_mutation_phase_bound(cell.n, cell.f, cell.lambda, cell.ell,
                                                         samples, rng);
            rows.push_back({"mutation-bound", cell.n, cell.n - static_cast<int>(cell.f),
                            cell.lambda, cell.ell, samples, res.empirical.estimate,
                            res.empirical.std_error, res.analytic_bound,
                            res.empirical.estimate >= res.analytic_bound -
                                                          3 * res.empirical.std_error});
        }
    }
    if (all || check == "crossover-bound") {
        for (const auto& cell : default_crossover_cells()) {
            const BitString target = BitString(cell.n).complemented();
            // state at distance d: the target with its first d bits flipped
            BitString base = target;
            for (int i = 0; i < cell.d; ++i) base.flip(static_cast<std::size_t>(i));
            const BitString mate =
                make_conditioned_mate(target, base, cell.ell, cell.newly_correct);
            const auto res = verify_crossover_phase_bound(target, base, mate, cell.ell,
                                                          cell.lambda, samples, rng);
            rows.push_back({"crossover-bound", cell.n, cell.d, cell.lambda, cell.ell, samples,
                            res.empirical.estimate, res.empirical.std_error, res.analytic_bound,
                            res.empirical.estimate >= res.analytic_bound -
                                                          3 * res.empirical.std_error});
        }
    }
    if (all || check == "success-prob") {
        for (const int d : {n / 2, n / 10, static_cast<int>(std::ceil(std::sqrt(n)))}) {
            const auto state = StateSpec::with_c0(n, d, 8.0);
            const auto rep = estimate_iteration_success(state, samples, rng);
            rows.push_back({"success-prob", n, d, state.lambda, -1, samples, rep.estimate,
                            rep.std_error, 0.2, rep.lower_3sigma > 0.2});
        }
    }
    if (all || check == "ceiling") {
        for (const int d : {n / 2, n / 10, static_cast<int>(std::ceil(std::sqrt(n))), 1}) {
            const auto rep =
                estimate_iteration_success(StateSpec::at_distance(n, d, n), samples, rng);
            rows.push_back({"ceiling", n, d, n, -1, samples, rep.estimate, rep.std_error, 0.40,
                            rep.upper_3sigma < 0.40});
        }
    }
    if (all || check == "c0-sweep") {
        const std::vector<int> dists = {n / 2, n / 10, static_cast<int>(std::ceil(std::sqrt(n)))};
        for (const auto& row : sweep_c0(n, dists, {2.0, 4.0, 8.0, 16.0}, samples, rng)) {
            rows.push_back({"c0-sweep-" + std::to_string(static_cast<int>(row.c0)), n, row.d,
                            row.lambda, -1, samples, row.report.estimate, row.report.std_error,
                            0.2, row.passes});
        }
    }
    if (all || check == "drift") {
        const std::int64_t steps = std::max<std::int64_t>(samples, 1000000);
        for (const double r : {3.0, 5.0}) {
            for (const double q : {0.1, 0.2, 0.31}) {
                const double drift = random_walk_drift(q, r, steps, rng);
                const double expect = drift_closed_form(q, r);
                const double sigma =
                    std::sqrt(q * (1 - q)) * (1.0 + 1.0 / (r - 1.0)) / std::sqrt(steps);
                OracleRow row;
                row.check = "drift-q" + std::to_string(q).substr(0, 4) + "-r" +
                            std::to_string(static_cast<int>(r));
                row.n = 0;
                row.samples = steps;
                row.estimate = drift;
                row.std_error = sigma;
                row.analytic = expect;
                row.pass = std::abs(drift - expect) <= 3 * sigma;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

ExperimentConfig config_from_cli(CLI::App* cmd, const std::string& config_path,
                                 const std::string& algo, const std::vector<int>& n_values,
                                 int reps, double F, double r, double lambda, double lambda0,
                                 double budget_factor, std::uint64_t seed,
                                 const std::string& out, bool trace, bool rounded, int threads) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw CLI::ValidationError("--config", "cannot read " + config_path);
        nlohmann::json j;
        is >> j;
        cfg = config_from_json(j);
    }
    // explicit flags take precedence over file values
    if (cmd->count("--algo")) cfg.algorithm = algorithm_from_name(algo);
    if (cmd->count("--n")) cfg.n_values = n_values;
    if (cmd->count("--reps")) cfg.replicates = reps;
    if (cmd->count("--F")) cfg.F = F;
    if (cmd->count("--r")) cfg.r = r;
    if (cmd->count("--lambda")) cfg.lambda = lambda;
    if (cmd->count("--lambda0")) cfg.lambda0 = lambda0;
    if (cmd->count("--budget-factor")) cfg.budget_factor = budget_factor;
    if (cmd->count("--seed")) cfg.base_seed = seed;
    if (cmd->count("--out")) cfg.out = out;
    if (cmd->count("--trace")) cfg.trace = trace;
    if (cmd->count("--rounded-rates")) cfg.rounded_rates = rounded;
    if (cmd->count("--threads")) cfg.threads = threads;
    return cfg;
}

std::vector<SummaryRow> read_summary_csv(const std::string& path, const std::string& algo) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty csv: " + path);
    std::vector<std::string> header;
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int c_algo = col("algorithm"), c_n = col("n"), c_mean = col("mean_evals");
    if (c_n < 0 || c_mean < 0) throw std::runtime_error("csv lacks n/mean_evals columns");
    std::vector<SummaryRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        SummaryRow row;
        row.algorithm = c_algo >= 0 ? cells[static_cast<std::size_t>(c_algo)] : "";
        if (!algo.empty() && row.algorithm != algo) continue;
        row.n = std::stoi(cells[static_cast<std::size_t>(c_n)]);
        row.mean_evals = std::stod(cells[static_cast<std::size_t>(c_mean)]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for the one-plus-(lambda,lambda) GA on generalized OneMax"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "run a replicated experiment over one or more n");
    std::string config_path, algo, out;
    std::vector<int> n_values;
    int reps = 100, threads = 0;
    double F = 1.5, r = 5.0, lambda = 1.0, lambda0 = 1.0, budget_factor = 1e4;
    std::uint64_t seed = 1;
    bool trace = false, rounded = false;
    run->add_option("--config", config_path, "JSON config file; flags override its values");
    run->add_option("--algo", algo,
                    "ga-static | ga-fitness-dependent | ga-self-adjusting | one-plus-one-ea | rls");
    run->add_option("--n", n_values, "problem size(s), repeatable");
    run->add_option("--reps", reps, "replicates per n");
    run->add_option("--F", F, "update strength (self-adjusting)");
    run->add_option("--r", r, "success-rule denominator (self-adjusting; 5 = one-fifth rule)");
    run->add_option("--lambda", lambda, "population size (static)");
    run->add_option("--lambda0", lambda0, "initial lambda (self-adjusting)");
    run->add_option("--budget-factor", budget_factor, "budget = factor * n evaluations");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--out", out, "summary CSV path (manifest written alongside)");
    run->add_flag("--trace", trace, "write one iteration-trace CSV per run");
    run->add_flag("--rounded-rates", rounded, "derive p and c from the rounded lambda");
    run->add_option("--threads", threads, "worker threads (0 = hardware)");

    // ---- grid ----
    auto* grid = app.add_subcommand("grid", "static-lambda grid at fixed n");
    int grid_n = 1000, grid_reps = 100, grid_threads = 0;
    std::vector<double> grid_lambdas;
    std::uint64_t grid_seed = 1;
    double grid_budget = 1e4;
    std::string grid_out;
    grid->add_option("--n", grid_n, "problem size")->required();
    grid->add_option("--lambda", grid_lambdas, "lambda values, repeatable")->required();
    grid->add_option("--reps", grid_reps, "replicates per lambda");
    grid->add_option("--seed", grid_seed, "base seed");
    grid->add_option("--budget-factor", grid_budget, "budget = factor * n");
    grid->add_option("--out", grid_out, "CSV path");
    grid->add_option("--threads", grid_threads, "worker threads");

    // ---- sweep-f ----
    auto* sweep = app.add_subcommand("sweep-f", "update-strength sweep for the self-adjusting GA");
    int sweep_n = 1000, sweep_reps = 50, sweep_threads = 0;
    std::vector<double> sweep_fs;
    double sweep_r = 5.0, sweep_budget = 1e4;
    std::uint64_t sweep_seed = 1;
    std::string sweep_out;
    sweep->add_option("--n", sweep_n, "problem size")->required();
    sweep->add_option("--F", sweep_fs, "F values, repeatable")->required();
    sweep->add_option("--r", sweep_r, "success-rule denominator");
    sweep->add_option("--reps", sweep_reps, "replicates per F");
    sweep->add_option("--seed", sweep_seed, "base seed");
    sweep->add_option("--budget-factor", sweep_budget, "budget = factor * n");
    sweep->add_option("--out", sweep_out, "CSV path");
    sweep->add_option("--threads", sweep_threads, "worker threads");

    // ---- oracle ----
    auto* oracle = app.add_subcommand("oracle", "Monte-Carlo validators");
    std::string check = "all", oracle_out;
    int oracle_n = 400;
    std::int64_t samples = 100000;
    std::uint64_t oracle_seed = 1;
    oracle->add_option("--check", check,
                       "all | mutation-bound | crossover-bound | success-prob | ceiling | "
                       "c0-sweep | drift");
    oracle->add_option("--n", oracle_n, "problem size for state-based checks");
    oracle->add_option("--samples", samples, "Monte-Carlo samples per cell");
    oracle->add_option("--seed", oracle_seed, "seed");
    oracle->add_option("--out", oracle_out, "CSV path");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "log-log slope of mean_evals vs n from a summary CSV");
    std::string fit_path, fit_algo;
    fit->add_option("csv", fit_path, "summary CSV produced by run/grid/sweep-f")->required();
    fit->add_option("--algo", fit_algo, "restrict to one algorithm");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const ExperimentConfig cfg = config_from_cli(
                run, config_path, algo, n_values, reps, F, r, lambda, lambda0, budget_factor,
                seed, out, trace, rounded, threads);
            const auto rows = run_experiment(cfg);
            print_rows(rows, SummaryCsvStyle::kRun);
        } else if (*grid) {
            const auto rows = static_lambda_grid(grid_n, grid_lambdas, grid_reps, grid_seed,
                                                 grid_budget, grid_threads);
            if (!grid_out.empty()) {
                std::ofstream os(grid_out, std::ios::binary);
                if (!os) throw std::runtime_error("cannot write " + grid_out);
                write_summary_csv(os, rows, SummaryCsvStyle::kGrid);
            }
            print_rows(rows, SummaryCsvStyle::kGrid);
        } else if (*sweep) {
            const auto rows = f_sweep(sweep_n, sweep_fs, sweep_r, sweep_reps, sweep_seed,
                                      sweep_budget, sweep_threads);
            if (!sweep_out.empty()) {
                std::ofstream os(sweep_out, std::ios::binary);
                if (!os) throw std::runtime_error("cannot write " + sweep_out);
                write_summary_csv(os, rows, SummaryCsvStyle::kSweep);
            }
            print_rows(rows, SummaryCsvStyle::kSweep);
        } else if (*oracle) {
            const auto rows = run_oracle_battery(check, oracle_n, samples, oracle_seed);
            if (!oracle_out.empty()) {
                std::ofstream os(oracle_out, std::ios::binary);
                if (!os) throw std::runtime_error("cannot write " + oracle_out);
                write_oracle_csv(os, rows);
            }
            write_oracle_csv(std::cout, rows);
        } else if (*fit) {
            const auto rows = read_summary_csv(fit_path, fit_algo);
            const LinearFit f2 = fit_loglog_slope(rows);
            std::printf("slope=%.6f intercept=%.6f r_squared=%.6f\n", f2.slope, f2.intercept,
                        f2.r_squared);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
