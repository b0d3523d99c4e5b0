#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "llga/engine.hpp"
#include "llga/stats.hpp"
#include "llga/version.hpp"

namespace llga {

enum class Algorithm { kGaStatic, kGaFitnessDependent, kGaSelfAdjusting, kOnePlusOneEa, kRls };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::kGaStatic: return "ga-static";
        case Algorithm::kGaFitnessDependent: return "ga-fitness-dependent";
        case Algorithm::kGaSelfAdjusting: return "ga-self-adjusting";
        case Algorithm::kOnePlusOneEa: return "one-plus-one-ea";
        case Algorithm::kRls: return "rls";
    }
    return "?";
}

inline Algorithm algorithm_from_name(const std::string& name) {
    for (const Algorithm a : {Algorithm::kGaStatic, Algorithm::kGaFitnessDependent,
                              Algorithm::kGaSelfAdjusting, Algorithm::kOnePlusOneEa,
                              Algorithm::kRls}) {
        if (name == algorithm_name(a)) return a;
    }
    throw std::invalid_argument("unknown algorithm: " + name);
}

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::kGaSelfAdjusting;
    std::vector<int> n_values;
    int replicates = 100;
    std::optional<double> F;        // self-adjusting only
    std::optional<double> r;        // self-adjusting only
    std::optional<double> lambda;   // static only
    std::optional<double> lambda0;  // self-adjusting only, defaults to 1
    double budget_factor = 1e4;
    std::uint64_t base_seed = 1;
    std::string out;                // empty: no files written
    bool trace = false;
    bool rounded_rates = false;
    int threads = 0;                // 0: hardware concurrency

    void validate() const;
};

inline void ExperimentConfig::validate() const {
    if (n_values.empty()) throw std::invalid_argument("config: n_values must be nonempty");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] < 1) throw std::invalid_argument("config: n must be >= 1");
        if (i > 0 && n_values[i] <= n_values[i - 1])
            throw std::invalid_argument("config: n_values must be strictly increasing");
    }
    if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    if (!(budget_factor > 0.0)) throw std::invalid_argument("config: budget_factor must be > 0");

    const bool is_static = algorithm == Algorithm::kGaStatic;
    const bool is_self_adj = algorithm == Algorithm::kGaSelfAdjusting;
    if (is_static) {
        if (!lambda) throw std::invalid_argument("config: ga-static requires lambda");
        if (*lambda < 1.0 || *lambda > n_values.front())
            throw std::invalid_argument("config: lambda must be in [1, min n]");
    } else if (lambda) {
        throw std::invalid_argument(std::string("config: lambda is not a parameter of ") +
                                    algorithm_name(algorithm));
    }
    if (!is_self_adj) {
        if (F) throw std::invalid_argument(std::string("config: F is not a parameter of ") +
                                           algorithm_name(algorithm));
        if (r) throw std::invalid_argument(std::string("config: r is not a parameter of ") +
                                           algorithm_name(algorithm));
        if (lambda0)
            throw std::invalid_argument(std::string("config: lambda0 is not a parameter of ") +
                                        algorithm_name(algorithm));
    } else {
        if (F && *F <= 1.0) throw std::invalid_argument("config: F must be > 1");
        if (r && *r < 2.0) throw std::invalid_argument("config: r must be >= 2");
        if (lambda0 && (*lambda0 < 1.0 || *lambda0 > n_values.front()))
            throw std::invalid_argument("config: lambda0 must be in [1, min n]");
    }
}

struct SummaryRow {
    std::string algorithm;
    int n = 0;
    int replicates = 0;
    double mean_evals = 0.0;
    double median_evals = 0.0;
    double std_evals = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double success_rate = 0.0;
    double mean_evals_over_n = 0.0;
    // grid/sweep extensions, absent from the plain summary schema
    double param_lambda = 0.0;
    double param_F = 0.0;
    double lambda_cap_frac = 0.0;
};

/// Runs one replicate. The hidden target is drawn from a stream derived from
/// the run seed, so a run is fully determined by (algorithm, n, seed).
inline RunResult execute_run(Algorithm algo, int n, std::uint64_t seed,
                             const ExperimentConfig& cfg, bool record_trace) {
    Rng target_rng(~seed);
    OneMaxInstance inst(random_bitstring(static_cast<std::size_t>(n), target_rng));
    const auto budget = static_cast<std::int64_t>(cfg.budget_factor * n);

    switch (algo) {
        case Algorithm::kOnePlusOneEa:
            return run_baseline(BaselineKind::kOnePlusOneEa, inst, budget, seed, record_trace);
        case Algorithm::kRls:
            return run_baseline(BaselineKind::kRls, inst, budget, seed, record_trace);
        default: break;
    }

    GaParams params = GaParams::make(n, seed, cfg.budget_factor);
    params.rounded_rates = cfg.rounded_rates;
    LambdaController ctrl;
    switch (algo) {
        case Algorithm::kGaStatic:
            ctrl = LambdaController::make_static(cfg.lambda.value());
            break;
        case Algorithm::kGaFitnessDependent:
            ctrl = LambdaController::make_fitness_dependent();
            break;
        default:
            ctrl = LambdaController::make_self_adjusting(cfg.F.value_or(1.5),
                                                         cfg.r.value_or(5.0),
                                                         cfg.lambda0.value_or(1.0));
            break;
    }
    params.F = ctrl.F;
    params.r = ctrl.r;
    params.lambda0 = ctrl.lambda_real;
    return run_ga(params, ctrl, inst, record_trace);
}

/// All replicates of one (algorithm, n) cell, fanned out over a worker pool.
/// Replicate i always uses seed derive_seed(base_seed, algorithm, n, i), so
/// results do not depend on the thread count and adding replicates never
/// changes existing runs.
inline std::vector<RunResult> run_replicates(Algorithm algo, int n, int replicates,
                                             const ExperimentConfig& cfg, bool record_trace) {
    std::vector<RunResult> results(static_cast<std::size_t>(replicates));
    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(replicates));

    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= replicates) return;
            const std::uint64_t seed =
                derive_seed(cfg.base_seed, algorithm_name(algo), static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(i));
            results[static_cast<std::size_t>(i)] = execute_run(algo, n, seed, cfg, record_trace);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return results;
}

inline SummaryRow summarize(Algorithm algo, int n, const std::vector<RunResult>& runs) {
    SummaryRow row;
    row.algorithm = algorithm_name(algo);
    row.n = n;
    row.replicates = static_cast<int>(runs.size());
    std::vector<double> evals;
    evals.reserve(runs.size());
    int found = 0;
    double cap_frac_sum = 0.0;
    for (const auto& r : runs) {
        evals.push_back(static_cast<double>(r.total_evals));
        if (r.found_optimum) ++found;
        if (r.total_iters > 0)
            cap_frac_sum += static_cast<double>(r.capped_iters) / static_cast<double>(r.total_iters);
    }
    row.mean_evals = mean_of(evals);
    row.median_evals = median_of(evals);
    row.std_evals = stddev_of(evals);
    const double half = 1.96 * row.std_evals / std::sqrt(static_cast<double>(runs.size()));
    row.ci95_low = row.mean_evals - half;
    row.ci95_high = row.mean_evals + half;
    row.success_rate = static_cast<double>(found) / static_cast<double>(runs.size());
    row.mean_evals_over_n = row.mean_evals / n;
    row.lambda_cap_frac = cap_frac_sum / static_cast<double>(runs.size());
    return row;
}

enum class SummaryCsvStyle { kRun, kGrid, kSweep };

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace detail

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows,
                              SummaryCsvStyle style) {
    os << "algorithm,n,replicates";
    if (style == SummaryCsvStyle::kGrid) os << ",lambda";
    if (style == SummaryCsvStyle::kSweep) os << ",F";
    os << ",mean_evals,median_evals,std_evals,ci95_low,ci95_high,success_rate,mean_evals_over_n";
    if (style == SummaryCsvStyle::kSweep) os << ",lambda_cap_frac";
    os << "\n";
    for (const auto& r : rows) {
        os << r.algorithm << ',' << r.n << ',' << r.replicates;
        if (style == SummaryCsvStyle::kGrid) os << ',' << detail::fmt(r.param_lambda);
        if (style == SummaryCsvStyle::kSweep) os << ',' << detail::fmt(r.param_F);
        os << ',' << detail::fmt(r.mean_evals) << ',' << detail::fmt(r.median_evals) << ','
           << detail::fmt(r.std_evals) << ',' << detail::fmt(r.ci95_low) << ','
           << detail::fmt(r.ci95_high) << ',' << detail::fmt(r.success_rate) << ','
           << detail::fmt(r.mean_evals_over_n);
        if (style == SummaryCsvStyle::kSweep) os << ',' << detail::fmt(r.lambda_cap_frac);
        os << "\n";
    }
}

inline void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
    os << "iter,lambda_real,lambda_int,ell,fitness_before,fitness_after,success,evals_cum\n";
    for (const auto& rec : trace) {
        os << rec.iter << ',' << detail::fmt(rec.lambda_real) << ',' << rec.lambda_int << ','
           << rec.ell << ',' << rec.fitness_before << ',' << rec.fitness_after << ','
           << (rec.success ? 1 : 0) << ',' << rec.evals_cum << "\n";
    }
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["algorithm"] = algorithm_name(cfg.algorithm);
    j["n_values"] = cfg.n_values;
    j["replicates"] = cfg.replicates;
    if (cfg.F) j["F"] = *cfg.F;
    if (cfg.r) j["r"] = *cfg.r;
    if (cfg.lambda) j["lambda"] = *cfg.lambda;
    if (cfg.lambda0) j["lambda0"] = *cfg.lambda0;
    j["budget_factor"] = cfg.budget_factor;
    j["base_seed"] = cfg.base_seed;
    j["out"] = cfg.out;
    j["trace"] = cfg.trace;
    j["rounded_rates"] = cfg.rounded_rates;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
    cfg.n_values = j.at("n_values").get<std::vector<int>>();
    if (j.contains("replicates")) cfg.replicates = j["replicates"].get<int>();
    if (j.contains("F")) cfg.F = j["F"].get<double>();
    if (j.contains("r")) cfg.r = j["r"].get<double>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("lambda0")) cfg.lambda0 = j["lambda0"].get<double>();
    if (j.contains("budget_factor")) cfg.budget_factor = j["budget_factor"].get<double>();
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("trace")) cfg.trace = j["trace"].get<bool>();
    if (j.contains("rounded_rates")) cfg.rounded_rates = j["rounded_rates"].get<bool>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    return cfg;
}

namespace detail {

inline std::string out_stem(const std::string& out) {
    const auto dot = out.rfind(".csv");
    return dot == std::string::npos ? out : out.substr(0, dot);
}

inline std::ofstream open_or_throw(const std::string& path) {
    std::ofstream os(path, std::ios::binary);  // binary: "\n" endings on every platform
    if (!os) throw std::runtime_error("cannot write output file: " + path);
    return os;
}

}  // namespace detail

/// Runs the configured experiment: replicates x |n_values| runs, one summary
/// row per n. With an output path set it writes the summary CSV, a JSON
/// manifest (config, seed rule, library version, per-row censoring), and,
/// if tracing is on, one per-run trace CSV. Identical config and base seed
/// give byte-identical files.
inline std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::optional<std::ofstream> out;
    if (!cfg.out.empty()) out = detail::open_or_throw(cfg.out);

    std::vector<SummaryRow> rows;
    nlohmann::json row_meta = nlohmann::json::array();
    for (const int n : cfg.n_values) {
        const auto runs = run_replicates(cfg.algorithm, n, cfg.replicates, cfg, cfg.trace);
        SummaryRow row = summarize(cfg.algorithm, n, runs);
        if (cfg.lambda) row.param_lambda = *cfg.lambda;
        if (cfg.F) row.param_F = *cfg.F;
        rows.push_back(row);
        row_meta.push_back({{"n", n},
                            {"success_rate", row.success_rate},
                            {"censored", row.success_rate < 1.0}});
        if (cfg.trace && !cfg.out.empty()) {
            const std::string stem = detail::out_stem(cfg.out);
            for (std::size_t i = 0; i < runs.size(); ++i) {
                auto ts = detail::open_or_throw(stem + "_trace_n" + std::to_string(n) + "_rep" +
                                                std::to_string(i) + ".csv");
                write_trace_csv(ts, runs[i].trace);
            }
        }
    }

    if (out) {
        write_summary_csv(*out, rows, SummaryCsvStyle::kRun);
        nlohmann::json manifest;
        manifest["config"] = config_to_json(cfg);
        manifest["library_version"] = kVersion;
        manifest["seed_rule"] =
            "run seed = splitmix64(fnv1a64(algorithm,n,replicate) xor base_seed); "
            "target seed = bitwise-not of run seed";
        manifest["rows"] = row_meta;
        auto ms = detail::open_or_throw(cfg.out + ".manifest.json");
        ms << manifest.dump(2) << "\n";
    }
    return rows;
}

/// One summary row per static lambda at fixed n; the empirical minimizer
/// locates the bottom of the runtime U-shape.
inline std::vector<SummaryRow> static_lambda_grid(int n, const std::vector<double>& lambda_values,
                                                  int replicates, std::uint64_t base_seed,
                                                  double budget_factor = 1e4, int threads = 0) {
    std::vector<SummaryRow> rows;
    for (const double lam : lambda_values) {
        ExperimentConfig cfg;
        cfg.algorithm = Algorithm::kGaStatic;
        cfg.n_values = {n};
        cfg.replicates = replicates;
        cfg.lambda = lam;
        cfg.base_seed = base_seed;
        cfg.budget_factor = budget_factor;
        cfg.threads = threads;
        cfg.validate();
        const auto runs = run_replicates(cfg.algorithm, n, replicates, cfg, false);
        SummaryRow row = summarize(cfg.algorithm, n, runs);
        row.param_lambda = lam;
        rows.push_back(row);
    }
    return rows;
}

/// One summary row per update strength F for the self-adjusting GA,
/// including the mean fraction of iterations spent at the lambda = n cap.
inline std::vector<SummaryRow> f_sweep(int n, const std::vector<double>& f_values, double r,
                                       int replicates, std::uint64_t base_seed,
                                       double budget_factor = 1e4, int threads = 0) {
    std::vector<SummaryRow> rows;
    for (const double F : f_values) {
        if (!(F > 1.0)) throw std::invalid_argument("f_sweep: every F must be > 1");
        ExperimentConfig cfg;
        cfg.algorithm = Algorithm::kGaSelfAdjusting;
        cfg.n_values = {n};
        cfg.replicates = replicates;
        cfg.F = F;
        cfg.r = r;
        cfg.base_seed = base_seed;
        cfg.budget_factor = budget_factor;
        cfg.threads = threads;
        cfg.validate();
        const auto runs = run_replicates(cfg.algorithm, n, replicates, cfg, false);
        SummaryRow row = summarize(cfg.algorithm, n, runs);
        row.param_F = F;
        rows.push_back(row);
    }
    return rows;
}

/// OLS fit of log(mean_evals) against log(n); slope near 1 means linear
/// growth on the tested window.
inline LinearFit fit_loglog_slope(const std::vector<SummaryRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        xs.push_back(std::log(static_cast<double>(r.n)));
        ys.push_back(std::log(r.mean_evals));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw std::invalid_argument("fit_loglog_slope: need >= 3 distinct n values");
    return ols_fit(xs, ys);
}

}  // namespace llga
