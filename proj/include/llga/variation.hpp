#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "llga/bitstring.hpp"
#include "llga/rng.hpp"

namespace llga {

namespace detail {

// CDF inversion; requires p <= 1/2 and n*p small enough that (1-p)^n does
// not underflow (callers stay below n*p <= 30, where it is >= 1e-19).
inline int binomial_inversion(int n, double p, Rng& rng) {
    const double q = 1.0 - p;
    const double ratio = p / q;
    double pmf = std::exp(n * std::log1p(-p));
    double cdf = pmf;
    const double u = rng.uniform01();
    int k = 0;
    while (u > cdf) {
        ++k;
        if (k > n) return n;  // guards accumulated rounding in cdf
        pmf *= ratio * (n - k + 1) / k;
        cdf += pmf;
    }
    return k;
}

// Hoermann's BTRS transformed rejection, exact for p <= 1/2, n*p >= 10.
inline int binomial_btrs(int n, double p, Rng& rng) {
    const double q = 1.0 - p;
    const double spq = std::sqrt(n * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const int m = static_cast<int>((n + 1) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(n - m + 1.0);
    for (;;) {
        const double u = rng.uniform01() - 0.5;
        double v = rng.uniform01();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + c);
        if (kf < 0 || kf > n) continue;
        const int k = static_cast<int>(kf);
        if (us >= 0.07 && v <= v_r) return k;
        v = std::log(v * alpha / (a / (us * us) + b));
        if (v <= h - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + (k - m) * lpq)
            return k;
    }
}

}  // namespace detail

/// Draws from Binomial(n, p) exactly: inversion while n*p <= 30, transformed
/// rejection beyond. The step size of one iteration is one such draw.
inline int sample_binomial(int n, double p, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_binomial: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_binomial: p must be in [0,1]");
    if (p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flipped = p > 0.5;
    const double ps = flipped ? 1.0 - p : p;
    const int k = (n * ps <= 30.0) ? detail::binomial_inversion(n, ps, rng)
                                   : detail::binomial_btrs(n, ps, rng);
    return flipped ? n - k : k;
}

/// Uniform k-subset of [0, n) by partial Fisher-Yates over a persistent
/// index pool. The swaps are undone afterwards, so a draw costs O(k), not
/// O(n), which matters when lambda offspring each need their own subset.
inline void sample_distinct_positions(std::size_t n, std::size_t k, Rng& rng,
                                      std::vector<std::uint32_t>& out) {
    thread_local std::vector<std::uint32_t> pool;      // identity between calls
    thread_local std::vector<std::uint32_t> undo;
    if (pool.size() < n) {
        const auto old = pool.size();
        pool.resize(n);
        std::iota(pool.begin() + old, pool.end(), static_cast<std::uint32_t>(old));
    }
    out.clear();
    undo.clear();
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.uniform_below(n - i);
        std::swap(pool[i], pool[j]);
        undo.push_back(static_cast<std::uint32_t>(j));
        out.push_back(pool[i]);
    }
    for (std::size_t i = k; i-- > 0;) std::swap(pool[i], pool[undo[i]]);
}

/// Flips exactly `ell` distinct positions of x, chosen uniformly at random.
inline BitString mutate(const BitString& x, int ell, Rng& rng) {
    if (ell < 0 || static_cast<std::size_t>(ell) > x.size())
        throw std::invalid_argument("mutate: ell must be in [0, n]");
    BitString y = x;
    thread_local std::vector<std::uint32_t> positions;
    sample_distinct_positions(x.size(), static_cast<std::size_t>(ell), rng, positions);
    for (const auto i : positions) y.flip(i);
    return y;
}

/// Biased uniform crossover: each position is taken from xprime with
/// probability c, from x otherwise. Implemented as a Binomial(n, c) count
/// plus a uniform subset, which is the same distribution with O(n/64 + k)
/// work instead of n Bernoulli draws.
inline BitString crossover(const BitString& x, const BitString& xprime, double c, Rng& rng) {
    if (x.size() != xprime.size())
        throw std::invalid_argument("crossover: length mismatch");
    if (!(c >= 0.0 && c <= 1.0))
        throw std::invalid_argument("crossover: c must be in [0,1]");
    BitString y = x;
    const int k = sample_binomial(static_cast<int>(x.size()), c, rng);
    thread_local std::vector<std::uint32_t> positions;
    sample_distinct_positions(x.size(), static_cast<std::size_t>(k), rng, positions);
    for (const auto i : positions) y.set(i, xprime.get(i));
    return y;
}

}  // namespace llga
