#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "llga/bitstring.hpp"
#include "llga/engine.hpp"
#include "llga/rng.hpp"
#include "llga/variation.hpp"

namespace llga {

/// Monte-Carlo estimate of a probability with its Wald standard error.
struct EstimateReport {
    double estimate = 0.0;
    std::int64_t samples = 0;
    double std_error = 0.0;
    double lower_3sigma = 0.0;
    double upper_3sigma = 0.0;

    static EstimateReport from_counts(std::int64_t hits, std::int64_t samples) {
        EstimateReport r;
        r.samples = samples;
        r.estimate = static_cast<double>(hits) / static_cast<double>(samples);
        r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(samples));
        r.lower_3sigma = r.estimate - 3.0 * r.std_error;
        r.upper_3sigma = r.estimate + 3.0 * r.std_error;
        return r;
    }
};

/// A start state for success-probability estimation: fitness distance d at
/// problem size n, population size lambda (optionally C0 times the
/// fitness-dependent choice sqrt(n/d) rounded up).
struct StateSpec {
    int n = 0;
    int d = 0;       // n - f(x)
    int lambda = 0;
    double c0 = 0.0; // informational: lambda = ceil(C0 * lambda_star) when built that way

    static StateSpec at_distance(int n, int d, int lambda) {
        return {n, d, lambda, 0.0};
    }
    static StateSpec with_c0(int n, int d, double c0) {
        StateSpec s{n, d, 0, c0};
        s.lambda = std::min(static_cast<int>(std::ceil(c0 * lambda_star(n, n - d))), n);
        return s;
    }
};

namespace detail {

// By symmetry of OneMax under position permutation the success probability
// depends on the distance only, so the canonical state flips the first d
// target bits.
inline BitString state_at_distance(const BitString& target, int d) {
    BitString x = target;
    for (int i = 0; i < d; ++i) x.flip(static_cast<std::size_t>(i));
    return x;
}

}  // namespace detail

/// Fraction of single GA iterations from the given state that strictly
/// increase the fitness, with p = lambda/n and c = 1/lambda.
inline EstimateReport estimate_iteration_success(const StateSpec& state, std::int64_t samples,
                                                 Rng& rng) {
    if (state.d < 1 || state.d > state.n)
        throw std::invalid_argument("estimate_iteration_success: d must be in [1, n]");
    if (state.lambda < 1 || state.lambda > state.n)
        throw std::invalid_argument("estimate_iteration_success: lambda must be in [1, n]");
    if (samples < 1000)
        throw std::invalid_argument("estimate_iteration_success: need at least 1e3 samples");

    const BitString target = BitString(static_cast<std::size_t>(state.n)).complemented();
    const BitString x0 = detail::state_at_distance(target, state.d);
    const double p = static_cast<double>(state.lambda) / state.n;
    const double c = 1.0 / static_cast<double>(state.lambda);
    const std::int64_t budget = std::int64_t{1} << 60;

    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        OneMaxInstance inst(target);
        BitString x = x0;
        Fitness fx = state.n - state.d;
        const IterationOutcome out = ga_iteration(x, fx, inst, state.lambda, p, c, budget, rng);
        if (out.success) ++hits;
    }
    return EstimateReport::from_counts(hits, samples);
}

/// Estimates the probability that the best of lambda mutants with forced
/// step size ell keeps more than f - ell agreements, next to the analytic
/// lower bound 1 - (f/n)^(lambda*ell).
struct BoundCheck {
    EstimateReport empirical;
    double analytic_bound = 0.0;
};

inline BoundCheck verify_mutation_phase_bound(int n, Fitness f, int lambda, int ell,
                                              std::int64_t samples, Rng& rng) {
    if (ell < 1 || ell > n)
        throw std::invalid_argument("verify_mutation_phase_bound: ell must be in [1, n]");
    if (f < 0 || f >= n)
        throw std::invalid_argument("verify_mutation_phase_bound: need 0 <= f < n");
    const BitString target = BitString(static_cast<std::size_t>(n)).complemented();
    const BitString x = detail::state_at_distance(target, n - static_cast<int>(f));

    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        bool ok = false;
        for (int i = 0; i < lambda && !ok; ++i) {
            const BitString mutant = mutate(x, ell, rng);
            ok = static_cast<Fitness>(mutant.agreement_count(target)) > f - ell;
        }
        if (ok) ++hits;
    }
    BoundCheck out;
    out.empirical = EstimateReport::from_counts(hits, samples);
    out.analytic_bound =
        1.0 - std::pow(static_cast<double>(f) / n, static_cast<double>(lambda) * ell);
    return out;
}

/// Builds a mate at Hamming distance ell from x that corrects
/// `newly_correct` wrong bits and breaks ell - newly_correct correct ones.
inline BitString make_conditioned_mate(const BitString& target, const BitString& x, int ell,
                                       int newly_correct) {
    if (newly_correct < 1 || newly_correct > ell)
        throw std::invalid_argument("make_conditioned_mate: need 1 <= newly_correct <= ell");
    BitString mate = x;
    int to_fix = newly_correct;
    int to_break = ell - newly_correct;
    for (std::size_t i = 0; i < x.size() && (to_fix > 0 || to_break > 0); ++i) {
        const bool agrees = x.get(i) == target.get(i);
        if (!agrees && to_fix > 0) {
            mate.flip(i);
            --to_fix;
        } else if (agrees && to_break > 0) {
            mate.flip(i);
            --to_break;
        }
    }
    if (to_fix > 0 || to_break > 0)
        throw std::invalid_argument("make_conditioned_mate: state has too few bits to flip");
    return mate;
}

/// Estimates the probability that the best of lambda crossover offspring of
/// (x, xprime) with c = 1/lambda strictly beats f(x), given the phase-1
/// conditioning OM(xprime) > OM(x) - ell, next to the analytic lower bound
/// 1 - (1 - c(1-c)^(ell-1))^lambda.
inline BoundCheck verify_crossover_phase_bound(const BitString& target, const BitString& x,
                                               const BitString& xprime, int ell, int lambda,
                                               std::int64_t samples, Rng& rng) {
    const auto fx = static_cast<Fitness>(x.agreement_count(target));
    const auto fxp = static_cast<Fitness>(xprime.agreement_count(target));
    if (x.hamming_distance(xprime) != static_cast<std::size_t>(ell) || fxp <= fx - ell)
        throw std::invalid_argument("verify_crossover_phase_bound: conditioning unsatisfiable");
    const double c = 1.0 / static_cast<double>(lambda);

    std::int64_t hits = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        bool ok = false;
        for (int i = 0; i < lambda && !ok; ++i) {
            const BitString y = crossover(x, xprime, c, rng);
            ok = static_cast<Fitness>(y.agreement_count(target)) > fx;
        }
        if (ok) ++hits;
    }
    BoundCheck out;
    out.empirical = EstimateReport::from_counts(hits, samples);
    out.analytic_bound =
        1.0 - std::pow(1.0 - c * std::pow(1.0 - c, ell - 1), static_cast<double>(lambda));
    return out;
}

/// Simulates the success-rule random walk: a step of -1 with probability q,
/// +1/(r-1) otherwise. Returns the empirical mean step, to be compared with
/// the closed form (1-q)/(r-1) - q, which vanishes exactly at q = 1/r.
inline double random_walk_drift(double q, double r, std::int64_t steps, Rng& rng) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("random_walk_drift: q must be in (0,1)");
    if (r <= 1.0) throw std::invalid_argument("random_walk_drift: r must be > 1");
    const double up = 1.0 / (r - 1.0);
    double sum = 0.0;
    for (std::int64_t i = 0; i < steps; ++i) sum += rng.bernoulli(q) ? -1.0 : up;
    return sum / static_cast<double>(steps);
}

inline double drift_closed_form(double q, double r) { return (1.0 - q) / (r - 1.0) - q; }

/// Fixed validation grid for the mutation-phase bound: the probability that
/// the best of lambda mutants with forced step size ell loses fewer than ell
/// agreements is at least 1 - (f/n)^(lambda*ell).
struct MutationCell {
    int n;
    Fitness f;
    int lambda;
    int ell;
};

inline const std::vector<MutationCell>& default_mutation_cells() {
    static const std::vector<MutationCell> cells = {
        {20, 19, 2, 1},  {20, 15, 1, 2},  {20, 10, 2, 3},   {50, 45, 4, 2},
        {50, 25, 1, 1},  {50, 40, 2, 5},  {100, 90, 4, 1},  {100, 99, 8, 1},
        {100, 50, 1, 3}, {100, 75, 2, 2}, {400, 396, 8, 4}, {400, 200, 4, 8},
    };
    return cells;
}

/// Fixed validation grid for the crossover-phase bound: states at distance d
/// with a mate that corrects `newly_correct` bits and breaks ell - newly_correct.
struct CrossoverCell {
    int n;
    int d;
    int ell;
    int newly_correct;
    int lambda;
};

inline const std::vector<CrossoverCell>& default_crossover_cells() {
    static const std::vector<CrossoverCell> cells = {
        {50, 1, 1, 1, 1},    {50, 4, 4, 1, 4},   {50, 5, 3, 2, 1},   {100, 10, 8, 1, 8},
        {100, 2, 2, 1, 2},   {100, 6, 6, 2, 4},  {200, 20, 16, 1, 16}, {200, 3, 2, 2, 8},
        {64, 8, 4, 1, 2},    {64, 1, 1, 1, 8},   {400, 40, 32, 1, 32}, {400, 10, 8, 3, 16},
    };
    return cells;
}

/// One row of the C0 sweep: does lambda = C0 * lambda_star push the
/// one-iteration success probability above 1/5 at this state?
struct C0SweepRow {
    double c0 = 0.0;
    int d = 0;
    int lambda = 0;
    EstimateReport report;
    bool passes = false;  // lower 3-sigma bound above 1/5
};

/// The multiplier in the success-probability floor is not pinned down by
/// theory, so sweep a grid and report which multipliers already suffice.
inline std::vector<C0SweepRow> sweep_c0(int n, const std::vector<int>& distances,
                                        const std::vector<double>& c0_values,
                                        std::int64_t samples, Rng& rng) {
    std::vector<C0SweepRow> rows;
    for (const double c0 : c0_values) {
        for (const int d : distances) {
            C0SweepRow row;
            row.c0 = c0;
            row.d = d;
            row.lambda = std::min(static_cast<int>(std::ceil(c0 * lambda_star(n, n - d))), n);
            row.report = estimate_iteration_success(
                StateSpec::at_distance(n, d, row.lambda), samples, rng);
            row.passes = row.report.lower_3sigma > 0.2;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace llga
