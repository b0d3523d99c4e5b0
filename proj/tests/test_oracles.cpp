#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "llga/oracles.hpp"

using namespace llga;

namespace {

BitString all_ones(int n) { return BitString(static_cast<std::size_t>(n)).complemented(); }

BitString state_at_distance(const BitString& target, int d) {
    BitString x = target;
    for (int i = 0; i < d; ++i) x.flip(static_cast<std::size_t>(i));
    return x;
}

}  // namespace

TEST_CASE("EstimateReport wires the Wald interval correctly") {
    const auto r = EstimateReport::from_counts(250, 1000);
    CHECK(r.estimate == Catch::Approx(0.25));
    CHECK(r.std_error == Catch::Approx(std::sqrt(0.25 * 0.75 / 1000)));
    CHECK(r.lower_3sigma == Catch::Approx(r.estimate - 3 * r.std_error));
    CHECK(r.upper_3sigma == Catch::Approx(r.estimate + 3 * r.std_error));
    CHECK(r.lower_3sigma <= r.estimate);
    CHECK(r.estimate <= r.upper_3sigma);
}

TEST_CASE("estimate_iteration_success input validation") {
    Rng rng(1);
    CHECK_THROWS_AS(estimate_iteration_success(StateSpec::at_distance(100, 0, 4), 2000, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_iteration_success(StateSpec::at_distance(100, 5, 4), 500, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_iteration_success(StateSpec::at_distance(100, 5, 0), 2000, rng),
                    std::invalid_argument);
}

TEST_CASE("success probability from the all-wrong state with lambda 1 "
          "equals the chance of a positive step size") {
    // From distance n with c = 1/lambda = 1 the iteration succeeds exactly
    // when ell >= 1: the crossover offspring copies the mutant, which fixes
    // ell bits. Analytically q = 1 - (1 - 1/n)^n.
    Rng rng(31);
    const auto rep =
        estimate_iteration_success(StateSpec::at_distance(100, 100, 1), 100000, rng);
    const double analytic = 1.0 - std::pow(0.99, 100);  // 0.63397...
    CHECK(rep.estimate == Catch::Approx(analytic).margin(0.006));
}

TEST_CASE("success floor: lambda = 8 * lambda_star keeps q above one fifth") {
    Rng rng(32);
    const auto state = StateSpec::with_c0(400, 4, 8.0);
    CHECK(state.lambda == 80);
    const auto rep = estimate_iteration_success(state, 20000, rng);
    CHECK(rep.lower_3sigma > 0.2);
}

TEST_CASE("success ceiling in the end game: q stays below 0.40 at lambda = n") {
    // At distance 1 with lambda = n every mutant is the complement, and the
    // crossover phase must pick up exactly the one repaired bit and nothing
    // else: q = 1 - (1 - (1/n)(1-1/n)^(n-1))^n, about 1 - e^(-1/e).
    Rng rng(33);
    const int n = 400;
    const auto rep = estimate_iteration_success(StateSpec::at_distance(n, 1, n), 20000, rng);
    const double per = (1.0 / n) * std::pow(1.0 - 1.0 / n, n - 1);
    const double analytic = 1.0 - std::pow(1.0 - per, n);
    CHECK(rep.estimate == Catch::Approx(analytic).margin(0.015));
    CHECK(rep.upper_3sigma < 0.40);
    CHECK(rep.lower_3sigma > 0.2);
}

TEST_CASE("success probability is monotone nondecreasing in lambda, up to noise") {
    Rng rng(34);
    const int n = 100, d = 10;
    double prev = -1.0, prev_se = 0.0;
    for (const int lambda : {2, 4, 8, 16, 32}) {
        const auto rep =
            estimate_iteration_success(StateSpec::at_distance(n, d, lambda), 20000, rng);
        if (prev >= 0.0) {
            CHECK(rep.estimate >=
                  prev - 3.0 * std::sqrt(prev_se * prev_se + rep.std_error * rep.std_error));
        }
        prev = rep.estimate;
        prev_se = rep.std_error;
    }
    CHECK(prev > 0.9);  // by lambda = 32 success is near certain at this state
}

TEST_CASE("mutation-phase bound: pinned example and degenerate cases") {
    Rng rng(35);
    // f = 0: the bound is exactly 1 and so is the empirical frequency
    const auto zero = verify_mutation_phase_bound(50, 0, 2, 3, 5000, rng);
    CHECK(zero.analytic_bound == 1.0);
    CHECK(zero.empirical.estimate == 1.0);

    const auto ex = verify_mutation_phase_bound(20, 19, 2, 1, 100000, rng);
    CHECK(ex.analytic_bound == Catch::Approx(0.0975));
    CHECK(ex.empirical.estimate >= ex.analytic_bound - 3 * ex.empirical.std_error);

    // lambda * ell large: bound tends to 1 and the estimate follows
    const auto big = verify_mutation_phase_bound(20, 10, 8, 8, 5000, rng);
    CHECK(big.analytic_bound > 0.999999);
    CHECK(big.empirical.estimate == 1.0);

    CHECK_THROWS_AS(verify_mutation_phase_bound(20, 19, 2, 0, 1000, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_mutation_phase_bound(20, 20, 2, 1, 1000, rng),
                    std::invalid_argument);
}

TEST_CASE("mutation-phase bound holds on the whole default grid (fast pass)") {
    Rng rng(36);
    for (const auto& cell : default_mutation_cells()) {
        const auto res =
            verify_mutation_phase_bound(cell.n, cell.f, cell.lambda, cell.ell, 20000, rng);
        CAPTURE(cell.n, cell.f, cell.lambda, cell.ell);
        CHECK(res.empirical.estimate >= res.analytic_bound - 3 * res.empirical.std_error);
    }
}

TEST_CASE("crossover-phase bound: pinned examples") {
    Rng rng(37);
    const auto target = all_ones(50);
    const auto x = state_at_distance(target, 5);

    // lambda = 1 means c = 1: the offspring copies the mate, which has one
    // repaired bit; both bound and estimate are exactly 1
    const auto mate1 = make_conditioned_mate(target, x, 1, 1);
    const auto one = verify_crossover_phase_bound(target, x, mate1, 1, 1, 2000, rng);
    CHECK(one.analytic_bound == 1.0);
    CHECK(one.empirical.estimate == 1.0);

    const auto mate4 = make_conditioned_mate(target, x, 4, 1);
    const auto ex = verify_crossover_phase_bound(target, x, mate4, 4, 4, 100000, rng);
    CHECK(ex.analytic_bound ==
          Catch::Approx(1.0 - std::pow(1.0 - 0.25 * std::pow(0.75, 3), 4.0)));
    // with exactly one repaired bit the bound is tight, so the estimate
    // matches it up to Monte-Carlo noise and never falls 3 sigma below
    CHECK(ex.empirical.estimate == Catch::Approx(ex.analytic_bound).margin(0.006));
    CHECK(ex.empirical.estimate >= ex.analytic_bound - 3 * ex.empirical.std_error);
}

TEST_CASE("crossover-phase bound approaches 1 - exp(-(1-c)^(ell-1)) for large lambda") {
    Rng rng(38);
    const int n = 64, lambda = 64;
    const auto target = all_ones(n);
    const auto x = state_at_distance(target, 2);
    const auto mate = make_conditioned_mate(target, x, 1, 1);
    const auto res = verify_crossover_phase_bound(target, x, mate, 1, lambda, 20000, rng);
    const double limit = 1.0 - std::exp(-1.0);  // c(1-c)^0 = 1/lambda, lambda -> inf
    CHECK(res.analytic_bound == Catch::Approx(limit).margin(0.01));
    CHECK(res.empirical.estimate >= res.analytic_bound - 3 * res.empirical.std_error);
}

TEST_CASE("crossover-phase bound rejects unsatisfiable conditioning") {
    Rng rng(39);
    const auto target = all_ones(50);
    const auto x = state_at_distance(target, 5);
    // a mate that only breaks bits: OM(mate) = OM(x) - ell
    BitString bad = x;
    bad.flip(10);
    bad.flip(11);
    CHECK_THROWS_AS(verify_crossover_phase_bound(target, x, bad, 2, 4, 1000, rng),
                    std::invalid_argument);
    // distance mismatch
    const auto mate = make_conditioned_mate(target, x, 3, 1);
    CHECK_THROWS_AS(verify_crossover_phase_bound(target, x, mate, 2, 4, 1000, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_conditioned_mate(target, x, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_conditioned_mate(target, x, 80, 10), std::invalid_argument);
}

TEST_CASE("crossover-phase bound holds on the whole default grid (fast pass)") {
    Rng rng(40);
    for (const auto& cell : default_crossover_cells()) {
        const auto target = all_ones(cell.n);
        const auto x = state_at_distance(target, cell.d);
        const auto mate = make_conditioned_mate(target, x, cell.ell, cell.newly_correct);
        const auto res =
            verify_crossover_phase_bound(target, x, mate, cell.ell, cell.lambda, 20000, rng);
        CAPTURE(cell.n, cell.d, cell.ell, cell.newly_correct, cell.lambda);
        CHECK(res.empirical.estimate >= res.analytic_bound - 3 * res.empirical.std_error);
    }
}

TEST_CASE("random walk drift matches its closed form") {
    Rng rng(41);
    const std::int64_t steps = 1000000;

    // the success rate 1/r is the fixed point of every 1/r rule
    const double at_fix = random_walk_drift(0.2, 5.0, steps, rng);
    const double sigma5 = std::sqrt(0.2 * 0.8) * 1.25 / std::sqrt(static_cast<double>(steps));
    CHECK(std::abs(at_fix) <= 3 * sigma5);
    CHECK(drift_closed_form(0.2, 5.0) == 0.0);
    const double third = 1.0 / 3.0;
    const double at_fix3 = random_walk_drift(third, 3.0, steps, rng);
    const double sigma3 =
        std::sqrt(third * (1 - third)) * 1.5 / std::sqrt(static_cast<double>(steps));
    CHECK(std::abs(at_fix3) <= 3 * sigma3);
    CHECK(std::abs(drift_closed_form(third, 3.0)) < 1e-15);

    const double d25 = random_walk_drift(0.25, 5.0, steps, rng);
    CHECK(d25 == Catch::Approx(-0.0625).margin(3 * sigma5));

    // a one-third rule keeps drifting up even at q = 0.31
    const double d31 = random_walk_drift(0.31, 3.0, steps, rng);
    CHECK(drift_closed_form(0.31, 3.0) == Catch::Approx(0.035));
    CHECK(d31 > 0.0);
    CHECK(d31 == Catch::Approx(0.035)
                     .margin(3 * std::sqrt(0.31 * 0.69) * 1.5 /
                             std::sqrt(static_cast<double>(steps))));

    CHECK_THROWS_AS(random_walk_drift(0.0, 5.0, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(random_walk_drift(1.0, 5.0, 10, rng), std::invalid_argument);
}

TEST_CASE("C0 sweep reports a passing multiplier at or below 8") {
    Rng rng(42);
    const int n = 100;
    const auto rows = sweep_c0(n, {50, 20, 10}, {2.0, 4.0, 8.0}, 5000, rng);
    REQUIRE(rows.size() == 9);
    for (const auto& row : rows) {
        CHECK(row.lambda ==
              std::min(static_cast<int>(std::ceil(row.c0 * lambda_star(n, n - row.d))), n));
    }
    // every state passes by C0 = 8
    int pass_at_8 = 0;
    for (const auto& row : rows)
        if (row.c0 == 8.0 && row.passes) ++pass_at_8;
    CHECK(pass_at_8 == 3);
}
