#pragma once

// Reference implementations used only by the tests. They share no code paths
// with the library beyond the NeuronEquation accessors.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "nre/equation.hpp"

namespace oracle {

/// Paper-scale recurrence on an oldest-first history: appends n outputs.
inline std::vector<int> trajectory(const nre::NeuronEquation& eq, std::vector<int> history, std::size_t n) {
    const std::size_t k = eq.memory();
    for (std::size_t step = 0; step < n; ++step) {
        std::int64_t u = 0;
        const std::size_t now = history.size();
        for (std::size_t j = 1; j <= k; ++j) u += eq.coeff(j) * history[now - j];
        history.push_back(u - eq.threshold2() >= 0 ? 1 : 0);
    }
    return history;
}

/// Fire bit of a window given as integer (bit j-1 = x(n-j)).
inline int fire(const nre::NeuronEquation& eq, std::uint64_t w) {
    std::int64_t u = 0;
    for (std::size_t j = 1; j <= eq.memory(); ++j)
        if ((w >> (j - 1)) & 1U) u += eq.coeff(j);
    return u >= eq.threshold2() ? 1 : 0;
}

struct Rho {
    std::uint64_t mu = 0;
    std::uint64_t lambda = 0;
};

/// Brent's cycle finding on an explicit successor function.
template <class F>
Rho brent(F f, std::uint64_t x0) {
    std::uint64_t power = 1, lam = 1;
    std::uint64_t tortoise = x0, hare = f(x0);
    while (tortoise != hare) {
        if (power == lam) {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = f(hare);
        ++lam;
    }
    tortoise = hare = x0;
    for (std::uint64_t i = 0; i < lam; ++i) hare = f(hare);
    std::uint64_t mu = 0;
    while (tortoise != hare) {
        tortoise = f(tortoise);
        hare = f(hare);
        ++mu;
    }
    return {mu, lam};
}

struct Census {
    std::map<std::uint64_t, std::uint64_t> chi;
    std::map<std::uint64_t, std::uint64_t> transients;
};

/// Independent simulation of every window, no sharing between trajectories.
inline Census per_window_census(const nre::NeuronEquation& eq) {
    const std::size_t k = eq.memory();
    const std::uint64_t n = std::uint64_t{1} << k;
    const std::uint64_t mask = n - 1;
    std::vector<std::uint8_t> table(n);
    for (std::uint64_t w = 0; w < n; ++w) table[w] = static_cast<std::uint8_t>(fire(eq, w));
    auto f = [&](std::uint64_t w) { return ((w << 1) | table[w]) & mask; };
    Census c;
    for (std::uint64_t w = 0; w < n; ++w) {
        const auto r = brent(f, w);
        ++c.chi[r.lambda];
        ++c.transients[r.mu];
    }
    return c;
}

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
    while (b != 0) {
        const auto t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

/// Smallest t >= 0 with t = a (mod l1) and t = b (mod l2), by scanning.
inline std::int64_t crt_scan(std::int64_t a, std::int64_t l1, std::int64_t b, std::int64_t l2) {
    for (std::int64_t t = 0; t <= l1 * l2 + a + b; ++t)
        if (t % l1 == a % l1 && t % l2 == b % l2) return t;
    return -1;
}

/// Smallest gamma in [1, T] fixing the support, trying every shift.
inline std::uint64_t set_period(std::uint64_t T, const std::set<std::uint64_t>& support) {
    for (std::uint64_t g = 1; g <= T; ++g) {
        bool ok = true;
        for (auto t : support)
            if (!support.contains((t + g) % T)) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    return T;
}

inline bool orbit_in_support(std::uint64_t T, const std::set<std::uint64_t>& support, std::uint64_t a,
                             std::uint64_t ell) {
    for (std::uint64_t i = 0; i < T; ++i)
        if (!support.contains((a + i * ell) % T)) return false;
    return true;
}

/// Random equation with small doubled coefficients.
inline nre::NeuronEquation random_equation(std::mt19937_64& rng, std::size_t k, std::int64_t span = 6) {
    std::uniform_int_distribution<std::int64_t> c(-span, span);
    std::vector<std::int64_t> coeffs(k);
    for (auto& x : coeffs) x = c(rng);
    return nre::NeuronEquation(std::move(coeffs), c(rng));
}

inline std::vector<int> random_bits(std::mt19937_64& rng, std::size_t k) {
    std::vector<int> out(k);
    for (auto& b : out) b = static_cast<int>(rng() & 1U);
    return out;
}

}  // namespace oracle
