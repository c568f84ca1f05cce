#pragma once

// Coefficient families built from the primes p_0 < ... < p_{s-1} lying in
// (2m, 3m), with alpha_i = 3m - p_i and memory k = 6m.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nre/cycle.hpp"
#include "nre/equation.hpp"
#include "nre/number_theory.hpp"

namespace nre {

struct ConstructionParams {
    std::int64_t m = 0;
    std::int64_t theta = 0;
    std::vector<std::int64_t> primes;  ///< every prime in (2m, 3m), increasing
    std::vector<std::int64_t> alphas;  ///< alpha_i = 3m - p_i
    std::int64_t k = 0;                ///< 6m

    /// Number of primes in (2m, 3m); also the slot count of the interleaved systems.
    std::size_t s() const noexcept { return primes.size(); }
};

/// Primes of (2m, 3m) and the derived quantities. `theta` defaults to 2m.
inline ConstructionParams derive_params(std::int64_t m, std::optional<std::int64_t> theta = {}) {
    if (m < 1) throw ParameterError("m must be positive");
    const std::int64_t th = theta.value_or(2 * m);
    if (th < 1) throw ParameterError("theta must be positive");
    if (th < 2 * m) throw ThetaTooSmall(th, m);
    ConstructionParams p;
    p.m = m;
    p.theta = th;
    p.primes = primes_in_open_interval(2 * m, 3 * m);
    if (p.primes.empty()) throw NoPrimesInInterval(m);
    for (auto prime : p.primes) p.alphas.push_back(3 * m - prime);
    p.k = 6 * m;
    return p;
}

/// Doubled value of the inhibitory coefficient -k(theta + m).
inline std::int64_t inhibitory_coeff2(const ConstructionParams& p) { return -2 * p.k * (p.theta + p.m); }

/// Lag p_i gets theta/2 - alpha_i, lag 2p_i gets theta/2 + alpha_i, every other
/// lag -k(theta + m). Threshold theta.
inline NeuronEquation build_coef1(const ConstructionParams& p) {
    std::vector<std::int64_t> coeffs(static_cast<std::size_t>(p.k), inhibitory_coeff2(p));
    for (std::size_t i = 0; i < p.s(); ++i) {
        const auto lag = static_cast<std::size_t>(p.primes[i]);
        coeffs[lag - 1] = p.theta - 2 * p.alphas[i];
        coeffs[2 * lag - 1] = p.theta + 2 * p.alphas[i];
    }
    return NeuronEquation(std::move(coeffs), 2 * p.theta);
}

/// Initial terms 0^{2 alpha_i} 1 0^{p_i - 1} 1 0^{p_i - 1}, oldest first.
inline StateWindow canonical_initial(const ConstructionParams& p, std::size_t i) {
    if (i >= p.s())
        throw IndexOutOfRange("prime index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(p.s()) + ")");
    Bits samples(static_cast<std::size_t>(p.k), 0);
    const auto first = static_cast<std::size_t>(2 * p.alphas[i]);
    samples[first] = 1;
    samples[first + static_cast<std::size_t>(p.primes[i])] = 1;
    return StateWindow::from_oldest_first(samples);
}

/// s-fold interleaving: lag s*j carries the base lag j, all other lags are 0.
/// Residue class r mod s of the output evolves as an independent copy of `base`.
inline NeuronEquation interleave(const NeuronEquation& base, std::size_t slots) {
    if (slots < 1) throw ParameterError("slot count must be at least 1");
    const std::size_t k = base.memory();
    std::vector<std::int64_t> coeffs(k * slots, 0);
    for (std::size_t j = 1; j <= k; ++j) coeffs[slots * j - 1] = base.coeff(j);
    return NeuronEquation(std::move(coeffs), base.threshold2());
}

/// Window of the interleaved system whose residue r carries `slots[r]`:
/// y(r + s t) = x_r(t) for 0 <= t < k.
inline StateWindow interleave_windows(std::span<const StateWindow> slots) {
    if (slots.empty()) throw ParameterError("need at least one slot window");
    const std::size_t s = slots.size();
    const std::size_t k = slots.front().size();
    for (const auto& w : slots)
        if (w.size() != k) throw WindowSizeError(k, w.size());
    const std::size_t h = s * k;
    StateWindow out(h);
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t t = 0; t < k; ++t)
            if (slots[r].bit(k - 1 - t)) out.set(h - 1 - (r + s * t), true);
    return out;
}

/// Inverse of interleave_windows for residue r.
inline StateWindow slot_window(const StateWindow& w, std::size_t slots, std::size_t r) {
    if (slots < 1 || w.size() % slots != 0 || r >= slots)
        throw ParameterError("window does not split into the requested slots");
    const std::size_t h = w.size();
    const std::size_t k = h / slots;
    StateWindow out(k);
    for (std::size_t t = 0; t < k; ++t)
        if (w.bit(h - 1 - (r + slots * t))) out.set(k - 1 - t, true);
    return out;
}

enum class Parity { Even, Odd };

struct Coef3Params {
    Parity s_parity = Parity::Even;
    std::int64_t k2 = 0;         ///< (6m - 1) s
    std::int64_t theta_bar = 0;  ///< 2s
    std::vector<std::vector<std::int64_t>> r1;  ///< r1[i] = {j p_i : 1 <= j <= 2s}
    std::set<std::int64_t> r3;                  ///< union of the r1 sets
    std::set<std::int64_t> r4;                  ///< {1..k2} minus r3

    bool in_r2(std::int64_t j) const { return j >= 1 && j <= k2; }
};

inline Coef3Params coef3_params(const ConstructionParams& p) {
    const auto s = static_cast<std::int64_t>(p.s());
    if (s < 2)
        throw SOutOfRange("the coef3 family needs at least two primes in (2m, 3m), found " +
                          std::to_string(s));
    Coef3Params c;
    c.s_parity = s % 2 == 0 ? Parity::Even : Parity::Odd;
    c.k2 = (6 * p.m - 1) * s;
    c.theta_bar = 2 * s;
    for (auto prime : p.primes) {
        std::vector<std::int64_t> set;
        for (std::int64_t j = 1; j <= 2 * s; ++j) {
            const std::int64_t lag = j * prime;
            if (!c.r3.insert(lag).second)
                throw R1Collision("lag " + std::to_string(lag) + " lies in two R1 sets");
            set.push_back(lag);
        }
        c.r1.push_back(std::move(set));
    }
    if (*c.r3.rbegin() > c.k2)
        throw ParameterError("R1 lag " + std::to_string(*c.r3.rbegin()) + " exceeds k2");
    for (std::int64_t j = 1; j <= c.k2; ++j)
        if (!c.r3.contains(j)) c.r4.insert(j);
    return c;
}

/// coef3 family with memory k2 = (6m-1)s and threshold 2s. For odd s the
/// cases are applied in the listed order, first match wins.
inline NeuronEquation build_coef3(const ConstructionParams& p) {
    const Coef3Params c = coef3_params(p);
    const auto s = static_cast<std::int64_t>(p.s());
    std::vector<std::int64_t> coeffs(static_cast<std::size_t>(c.k2), 2 * (-4 * c.k2));
    for (std::size_t i = 0; i < p.s(); ++i) {
        const std::int64_t prime = p.primes[i];
        for (std::int64_t lag : c.r1[i]) {
            std::int64_t value = 0;
            if (c.s_parity == Parity::Even) {
                // j <= 3 s p / 2, compared without the division
                value = 2 * lag <= 3 * s * prime ? 2 : -2;
            } else if (lag <= (3 * s - 1) / 2 * prime) {
                value = 2;
            } else if ((3 * s + 1) / 2 * prime <= lag && lag <= (2 * s - 2) * prime) {
                value = -2;
            } else if (lag == (2 * s - 1) * prime || lag == 2 * s * prime) {
                value = -1;
            } else {
                continue;  // falls through to the inhibitory default
            }
            coeffs[static_cast<std::size_t>(lag - 1)] = 2 * value;
        }
    }
    return NeuronEquation(std::move(coeffs), 2 * c.theta_bar);
}

/// coef1 with the excitatory lags of p_0..p_d made inhibitory.
inline NeuronEquation build_suppressed_coef1(const ConstructionParams& p, std::size_t d) {
    if (d >= p.s())
        throw IndexOutOfRange("suppression index " + std::to_string(d) + " out of range [0, " +
                              std::to_string(p.s()) + ")");
    const NeuronEquation base = build_coef1(p);
    std::vector<std::int64_t> coeffs(base.coeffs().begin(), base.coeffs().end());
    for (std::size_t i = 0; i <= d; ++i) {
        const auto lag = static_cast<std::size_t>(p.primes[i]);
        coeffs[lag - 1] = inhibitory_coeff2(p);
        coeffs[2 * lag - 1] = inhibitory_coeff2(p);
    }
    return NeuronEquation(std::move(coeffs), 2 * p.theta);
}

/// Member d of the bifurcation family: the suppressed coef1 interleaved s times.
inline NeuronEquation build_z(const ConstructionParams& p, std::size_t d) {
    return interleave(build_suppressed_coef1(p, d), p.s());
}

/// Primes still excitatory in build_z(p, d), i.e. p_{d+1} .. p_{s-1}.
inline std::vector<std::int64_t> surviving_primes(const ConstructionParams& p, std::size_t d) {
    if (d >= p.s()) throw IndexOutOfRange("suppression index out of range");
    return {p.primes.begin() + static_cast<std::ptrdiff_t>(d + 1), p.primes.end()};
}

/// {1} together with s * lcm(E) for every nonempty multiset E of size <= s over
/// `prime_subset`. For primes lcm(E) is the product of the distinct members, so
/// this is {1} u {s * prod(Q) : Q a nonempty subset}.
inline std::set<std::uint64_t> admissible_periods(const ConstructionParams& p,
                                                  std::span<const std::int64_t> prime_subset) {
    for (auto q : prime_subset)
        if (std::find(p.primes.begin(), p.primes.end(), q) == p.primes.end())
            throw ParameterError(std::to_string(q) + " is not one of the construction primes");
    std::set<std::int64_t> distinct(prime_subset.begin(), prime_subset.end());
    std::vector<std::uint64_t> values(distinct.begin(), distinct.end());
    const std::uint64_t s = p.s();
    std::set<std::uint64_t> out{1};
    const std::size_t n = values.size();
    // a multiset of size <= s has at most s distinct members
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        if (static_cast<std::uint64_t>(std::popcount(mask)) > s) continue;
        std::uint64_t prod = 1;
        for (std::size_t b = 0; b < n; ++b)
            if ((mask >> b) & 1U) prod *= values[b];
        out.insert(s * prod);
    }
    return out;
}

}  // namespace nre
