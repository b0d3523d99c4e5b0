#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "llga/bitstring.hpp"

namespace llga {

/// Rounds to the closest integer, fractional part of exactly 1/2 rounding up.
inline int round_lambda(double lambda_real) {
    if (lambda_real < 1.0)
        throw std::invalid_argument("round_lambda: lambda must be >= 1");
    return static_cast<int>(std::floor(lambda_real + 0.5));
}

/// Fitness-dependent population size ceil(sqrt(n / (n - f))), computed with
/// an integer fix-up so the ceiling is exact for all representable inputs.
inline int lambda_star(int n, Fitness f) {
    if (f >= n)
        throw std::invalid_argument("lambda_star: undefined at the optimum");
    const auto d = static_cast<long long>(n) - f;
    auto lam = static_cast<long long>(
        std::ceil(std::sqrt(static_cast<double>(n) / static_cast<double>(d))));
    while (lam > 1 && (lam - 1) * (lam - 1) * d >= n) --lam;
    while (lam * lam * d < n) ++lam;
    return static_cast<int>(lam);
}

enum class ControllerMode { kStatic, kFitnessDependent, kSelfAdjusting };

/// Population-size control strategy. lambda is kept as a real number; callers
/// round only where an offspring count is required. The self-adjusting rule
/// divides by F on success and multiplies by F^(1/(r-1)) otherwise (the
/// one-fifth rule is r = 5), clamped to [1, n].
struct LambdaController {
    ControllerMode mode = ControllerMode::kSelfAdjusting;
    double lambda_real = 1.0;
    double F = 1.5;
    double r = 5.0;

    static LambdaController make_static(double lambda) {
        return {ControllerMode::kStatic, lambda, 0.0, 0.0};
    }
    static LambdaController make_fitness_dependent() {
        return {ControllerMode::kFitnessDependent, 1.0, 0.0, 0.0};
    }
    static LambdaController make_self_adjusting(double F, double r = 5.0, double lambda0 = 1.0) {
        if (F <= 1.0) throw std::invalid_argument("LambdaController: F must be > 1");
        if (r < 2.0) throw std::invalid_argument("LambdaController: r must be >= 2");
        return {ControllerMode::kSelfAdjusting, lambda0, F, r};
    }

    void observe_fitness(int n, Fitness f) {
        if (mode == ControllerMode::kFitnessDependent && f < n)
            lambda_real = lambda_star(n, f);
    }
};

inline void update_lambda_self_adjusting(LambdaController& ctrl, bool success, int n) {
    if (ctrl.mode != ControllerMode::kSelfAdjusting) return;
    if (success)
        ctrl.lambda_real = std::max(ctrl.lambda_real / ctrl.F, 1.0);
    else
        ctrl.lambda_real =
            std::min(ctrl.lambda_real * std::pow(ctrl.F, 1.0 / (ctrl.r - 1.0)), static_cast<double>(n));
}

}  // namespace llga
