#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "llga/bitstring.hpp"
#include "llga/controller.hpp"
#include "llga/rng.hpp"
#include "llga/variation.hpp"

namespace llga {

struct GaParams {
    int n = 0;
    double F = 1.5;          // update strength, > 1 (self-adjusting only)
    double r = 5.0;          // success-rule denominator, >= 2; one-fifth rule is r = 5
    double lambda0 = 1.0;    // initial lambda
    std::int64_t budget = 0; // max fitness evaluations; default 1e4 * n
    std::uint64_t seed = 1;
    bool rounded_rates = false;  // p and c from the rounded lambda (sensitivity switch)

    static GaParams make(int n, std::uint64_t seed, double budget_factor = 1e4) {
        GaParams p;
        p.n = n;
        p.seed = seed;
        p.budget = static_cast<std::int64_t>(budget_factor * n);
        return p;
    }

    void validate() const {
        if (n < 1) throw std::invalid_argument("GaParams: n must be >= 1");
        if (budget < 1) throw std::invalid_argument("GaParams: budget must be >= 1");
        if (lambda0 < 1.0 || lambda0 > n)
            throw std::invalid_argument("GaParams: lambda0 must be in [1, n]");
    }
};

struct IterationRecord {
    std::int64_t iter = 0;
    double lambda_real = 0.0;
    int lambda_int = 0;
    int ell = 0;
    Fitness fitness_before = 0;
    Fitness fitness_after = 0;
    bool success = false;
    std::int64_t evals_cum = 0;
};

struct RunResult {
    std::int64_t total_evals = 0;
    std::int64_t total_iters = 0;
    bool found_optimum = false;
    bool budget_exhausted = false;
    std::vector<IterationRecord> trace;
    std::uint64_t seed = 0;
    std::int64_t capped_iters = 0;  // iterations started with lambda at the upper barrier
};

enum class IterationStatus { kCompleted, kFoundOptimum, kBudgetExhausted };

struct IterationOutcome {
    IterationStatus status = IterationStatus::kCompleted;
    bool success = false;           // strict fitness increase
    bool incumbent_changed = false; // x was replaced by a y != x
    int ell = 0;
    Fitness fitness_after = 0;      // f(x) at exit, or the optimal value on kFoundOptimum
};

/// One iteration of the (1+(lambda,lambda)) GA: a shared step size ell is
/// drawn from B(n, p) once, lambda mutants of x are created and evaluated,
/// one best mutant x' is picked uniformly, lambda crossover offspring of
/// (x, x') follow, and the best offspring that differs from x replaces x if
/// its fitness is at least f(x). Every offspring evaluation is charged,
/// duplicates included; the iteration stops the moment an evaluation hits
/// the optimum or the next evaluation would exceed the budget.
template <class Objective>
IterationOutcome ga_iteration(BitString& x, Fitness& fx, Objective& obj, int lambda_int,
                              double p, double c, std::int64_t budget, Rng& rng) {
    const auto n = static_cast<int>(obj.size());
    if (lambda_int < 1 || lambda_int > n)
        throw std::invalid_argument("ga_iteration: lambda must be in [1, n]");

    IterationOutcome out;
    out.ell = sample_binomial(n, p, rng);

    thread_local std::vector<std::uint32_t> positions;

    // Mutation phase: reservoir-pick x' uniformly among mutants of max fitness.
    // For ell > n/2 a mutant is the complement with a uniform (n - ell)-subset
    // flipped back, which is the same distribution with less work.
    const bool from_complement = 2 * out.ell > n;
    const auto flips_per_mutant = static_cast<std::size_t>(from_complement ? n - out.ell : out.ell);
    const BitString mutation_base = from_complement ? x.complemented() : x;
    BitString best_mutant(static_cast<std::size_t>(n));
    BitString candidate(static_cast<std::size_t>(n));
    Fitness best_mutant_f = std::numeric_limits<Fitness>::min();
    std::uint64_t mutant_ties = 0;
    for (int i = 0; i < lambda_int; ++i) {
        if (obj.eval_count() >= budget) {
            out.status = IterationStatus::kBudgetExhausted;
            out.fitness_after = fx;
            return out;
        }
        candidate = mutation_base;
        sample_distinct_positions(static_cast<std::size_t>(n), flips_per_mutant, rng, positions);
        for (const auto pos : positions) candidate.flip(pos);
        const Fitness f = obj.evaluate(candidate);
        if (obj.optimum_found()) {
            out.status = IterationStatus::kFoundOptimum;
            out.success = f > fx;
            out.fitness_after = f;
            return out;
        }
        if (f > best_mutant_f) {
            best_mutant_f = f;
            std::swap(best_mutant, candidate);
            mutant_ties = 1;
        } else if (f == best_mutant_f) {
            ++mutant_ties;
            if (rng.uniform_below(mutant_ties) == 0) std::swap(best_mutant, candidate);
        }
    }

    // x and x' differ in exactly ell positions, and a biased-uniform
    // crossover offspring is determined by which differing positions it
    // takes, so sample Binomial(ell, c) plus a uniform subset of the
    // differing set. Same offspring distribution, O(ell) instead of O(n).
    thread_local std::vector<std::uint32_t> diff;
    diff.clear();
    for (std::size_t w = 0; w < x.words().size(); ++w) {
        std::uint64_t dw = x.words()[w] ^ best_mutant.words()[w];
        while (dw) {
            diff.push_back(static_cast<std::uint32_t>(w * 64) +
                           static_cast<std::uint32_t>(std::countr_zero(dw)));
            dw &= dw - 1;
        }
    }

    // Crossover phase: offspring equal to x are evaluated (and charged) but
    // disregarded when choosing y.
    BitString best_y(static_cast<std::size_t>(n));
    Fitness best_y_f = 0;
    bool have_y = false;
    std::uint64_t y_ties = 0;
    for (int i = 0; i < lambda_int; ++i) {
        if (obj.eval_count() >= budget) {
            out.status = IterationStatus::kBudgetExhausted;
            out.fitness_after = fx;
            return out;
        }
        candidate = x;
        if (!diff.empty()) {
            const int take = sample_binomial(static_cast<int>(diff.size()), c, rng);
            sample_distinct_positions(diff.size(), static_cast<std::size_t>(take), rng,
                                      positions);
            for (const auto idx : positions) candidate.flip(diff[idx]);
        }
        const Fitness f = obj.evaluate(candidate);
        if (obj.optimum_found()) {
            out.status = IterationStatus::kFoundOptimum;
            out.success = f > fx;
            out.fitness_after = f;
            return out;
        }
        if (candidate == x) continue;
        if (!have_y || f > best_y_f) {
            best_y_f = f;
            std::swap(best_y, candidate);
            have_y = true;
            y_ties = 1;
        } else if (f == best_y_f) {
            ++y_ties;
            if (rng.uniform_below(y_ties) == 0) std::swap(best_y, candidate);
        }
    }

    // Selection: y replaces x iff f(y) >= f(x); success means strict increase.
    if (have_y && best_y_f >= fx) {
        out.success = best_y_f > fx;
        out.incumbent_changed = true;
        x = std::move(best_y);
        fx = best_y_f;
    }
    out.fitness_after = fx;
    return out;
}

/// Runs the GA with the given population-size controller until an optimum
/// is evaluated or the budget is exhausted. The controller's real-valued
/// lambda is rounded only for the offspring counts; the rates p = lambda/n
/// and c = 1/lambda use the real value unless rounded_rates is set.
template <class Objective>
RunResult run_ga(const GaParams& params, LambdaController ctrl, Objective& obj,
                 bool record_trace = false) {
    params.validate();
    const int n = params.n;
    if (ctrl.lambda_real < 1.0 || ctrl.lambda_real > n)
        throw std::invalid_argument("run_ga: controller lambda must start in [1, n]");
    Rng rng(params.seed);
    RunResult result;
    result.seed = params.seed;

    BitString x = random_bitstring(static_cast<std::size_t>(n), rng);
    Fitness fx = obj.evaluate(x);
    if (obj.optimum_found()) {
        result.total_evals = obj.eval_count();
        result.found_optimum = true;
        return result;
    }
    ctrl.observe_fitness(n, fx);

    for (std::int64_t t = 1;; ++t) {
        if (obj.eval_count() >= params.budget) {
            result.budget_exhausted = true;
            break;
        }
        const double lambda_real = ctrl.lambda_real;
        const int lambda_int = std::min(round_lambda(lambda_real), n);
        const double lambda_rate = params.rounded_rates ? lambda_int : lambda_real;
        const double p = lambda_rate / n;
        const double c = 1.0 / lambda_rate;
        if (lambda_real >= static_cast<double>(n)) ++result.capped_iters;

        const Fitness f_before = fx;
        const IterationOutcome it =
            ga_iteration(x, fx, obj, lambda_int, p, c, params.budget, rng);
        result.total_iters = t;

        if (record_trace) {
            IterationRecord rec;
            rec.iter = t;
            rec.lambda_real = lambda_real;
            rec.lambda_int = lambda_int;
            rec.ell = it.ell;
            rec.fitness_before = f_before;
            rec.fitness_after = it.fitness_after;
            rec.success = it.success;
            rec.evals_cum = obj.eval_count();
            result.trace.push_back(rec);
        }

        if (it.status == IterationStatus::kFoundOptimum) {
            result.found_optimum = true;
            break;
        }
        if (it.status == IterationStatus::kBudgetExhausted) {
            result.budget_exhausted = true;
            break;
        }
        update_lambda_self_adjusting(ctrl, it.success, n);
        ctrl.observe_fitness(n, fx);
    }
    result.total_evals = obj.eval_count();
    return result;
}

enum class BaselineKind { kOnePlusOneEa, kRls };

/// Elitist single-trajectory baselines charged one evaluation per iteration:
/// the (1+1) EA flips each bit independently with rate 1/n (drawn as a
/// binomial count plus uniform subset, the same distribution), RLS flips
/// exactly one uniform bit.
template <class Objective>
RunResult run_baseline(BaselineKind kind, Objective& obj, std::int64_t budget,
                       std::uint64_t seed, bool record_trace = false) {
    if (budget < 1) throw std::invalid_argument("run_baseline: budget must be >= 1");
    const auto n = static_cast<int>(obj.size());
    Rng rng(seed);
    RunResult result;
    result.seed = seed;

    BitString x = random_bitstring(static_cast<std::size_t>(n), rng);
    Fitness fx = obj.evaluate(x);
    if (obj.optimum_found()) {
        result.total_evals = obj.eval_count();
        result.found_optimum = true;
        return result;
    }

    for (std::int64_t t = 1;; ++t) {
        if (obj.eval_count() >= budget) {
            result.budget_exhausted = true;
            break;
        }
        const int ell =
            kind == BaselineKind::kRls ? 1 : sample_binomial(n, 1.0 / n, rng);
        BitString y = mutate(x, ell, rng);
        const Fitness fy = obj.evaluate(y);
        result.total_iters = t;
        const bool success = fy > fx;
        if (record_trace) {
            IterationRecord rec;
            rec.iter = t;
            rec.lambda_real = 1.0;
            rec.lambda_int = 1;
            rec.ell = ell;
            rec.fitness_before = fx;
            rec.fitness_after = fy >= fx ? fy : fx;
            rec.success = success;
            rec.evals_cum = obj.eval_count();
            result.trace.push_back(rec);
        }
        if (obj.optimum_found()) {
            result.found_optimum = true;
            break;
        }
        if (fy >= fx) {
            x = std::move(y);
            fx = fy;
        }
    }
    result.total_evals = obj.eval_count();
    return result;
}

}  // namespace llga
