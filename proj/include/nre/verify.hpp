#pragma once

// Verification harnesses built on the census and the constructions.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nre/census.hpp"
#include "nre/chains.hpp"
#include "nre/constructions.hpp"
#include "nre/cycle.hpp"

namespace nre {

struct PeriodViolation {
    std::uint64_t period = 0;
    std::uint64_t count = 0;
    StateWindow witness;
};

struct PeriodSupportReport {
    bool pass = true;
    std::set<std::uint64_t> predicted;
    std::vector<PeriodViolation> violators;
};

/// PASS iff every period with a nonzero count is predicted.
inline PeriodSupportReport verify_period_support(const BasinCensus& census, const std::set<std::uint64_t>& predicted) {
    PeriodSupportReport r;
    r.predicted = predicted;
    for (const auto& [period, count] : census.chi) {
        if (count == 0 || predicted.contains(period)) continue;
        PeriodViolation v{period, count, {}};
        for (const auto& a : census.attractors)
            if (a.period == period) {
                v.witness = a.witness;
                break;
            }
        r.violators.push_back(std::move(v));
    }
    r.pass = r.violators.empty();
    return r;
}

struct AttainmentCase {
    std::vector<std::optional<std::size_t>> slots;  ///< prime index per slot, empty = zero slot
    std::uint64_t expected = 0;
    std::uint64_t measured = 0;
    std::uint64_t transient = 0;
    bool ok = false;
};

struct AttainmentReport {
    std::optional<std::size_t> d;
    std::vector<std::int64_t> surviving;
    std::set<std::uint64_t> predicted;
    std::set<std::uint64_t> attained;
    std::vector<AttainmentCase> cases;
    bool pass = false;
};

/// The y-system (no `d`) or z(n, d): seeds every multiset of surviving primes
/// (plus zero slots) through canonical initials placed in the residue slots and
/// checks the measured period against s * lcm.
inline AttainmentReport verify_attainment(const ConstructionParams& p, std::optional<std::size_t> d,
                                          std::uint64_t max_steps = kDefaultMaxSteps) {
    AttainmentReport r;
    r.d = d;
    const NeuronEquation eq = d ? build_z(p, *d) : interleave(build_coef1(p), p.s());
    std::vector<std::optional<std::size_t>> choices{std::nullopt};
    for (std::size_t i = d ? *d + 1 : 0; i < p.s(); ++i) {
        choices.emplace_back(i);
        r.surviving.push_back(p.primes[i]);
    }
    r.predicted = admissible_periods(p, r.surviving);

    const std::size_t s = p.s();
    std::vector<std::size_t> pick(s, 0);  // nondecreasing indices into `choices`
    const StateWindow zero(static_cast<std::size_t>(p.k));
    bool all_ok = true;
    while (true) {
        AttainmentCase c;
        std::vector<StateWindow> windows;
        std::vector<std::uint64_t> periods;
        for (auto idx : pick) {
            c.slots.push_back(choices[idx]);
            if (choices[idx]) {
                windows.push_back(canonical_initial(p, *choices[idx]));
                periods.push_back(static_cast<std::uint64_t>(p.primes[*choices[idx]]));
            } else {
                windows.push_back(zero);
            }
        }
        c.expected = periods.empty() ? 1 : s * lcm_of(periods);
        const auto summary = detect_cycle(eq, interleave_windows(windows), max_steps);
        c.measured = summary.period;
        c.transient = summary.transient;
        c.ok = c.measured == c.expected;
        all_ok = all_ok && c.ok;
        r.attained.insert(c.measured);
        r.cases.push_back(std::move(c));

        std::size_t pos = s;
        while (pos > 0 && pick[pos - 1] + 1 == choices.size()) --pos;
        if (pos == 0) break;
        ++pick[pos - 1];
        for (std::size_t q = pos; q < s; ++q) pick[q] = pick[pos - 1];
    }
    r.pass = all_ok && r.attained == r.predicted;
    return r;
}

struct CompositionReport {
    std::size_t g = 0;
    std::vector<std::uint64_t> slot_transients;
    std::vector<std::uint64_t> slot_periods;
    std::uint64_t expected_transient = 0;  ///< g * max T_j
    std::uint64_t measured_transient = 0;
    std::uint64_t measured_period = 0;
    std::optional<std::uint64_t> expected_period;  ///< g * lcm p_j when some p_j >= 2
    bool pass = false;
};

/// Interleaves g copies of `base`, slot r seeded with `slot_inits[r]`, and checks
/// (T, p) against (g max T_j, g lcm p_j), or p | g when every p_j = 1.
inline CompositionReport verify_composition_law(const NeuronEquation& base, const std::vector<StateWindow>& slot_inits,
                                                std::uint64_t max_steps = kDefaultMaxSteps) {
    CompositionReport r;
    r.g = slot_inits.size();
    if (r.g == 0) throw ParameterError("composition needs at least one slot");
    bool some_periodic = false;
    for (const auto& w : slot_inits) {
        const auto c = detect_cycle(base, w, max_steps);
        r.slot_transients.push_back(c.transient);
        r.slot_periods.push_back(c.period);
        r.expected_transient = std::max(r.expected_transient, c.transient);
        some_periodic = some_periodic || c.period >= 2;
    }
    r.expected_transient *= r.g;
    const auto composed = detect_cycle(interleave(base, r.g), interleave_windows(slot_inits), max_steps);
    r.measured_transient = composed.transient;
    r.measured_period = composed.period;
    bool period_ok = false;
    if (some_periodic) {
        r.expected_period = r.g * lcm_of(r.slot_periods);
        period_ok = r.measured_period == *r.expected_period;
    } else {
        period_ok = r.g % r.measured_period == 0;
    }
    r.pass = period_ok && r.measured_transient == r.expected_transient;
    return r;
}

enum class ClassicShape { Palindromic, JPalindromic, GeometricNeg, GeometricPos };

/// b = numerator / 2^exponent.
struct Dyadic {
    std::uint64_t numerator = 1;
    unsigned exponent = 1;
};

struct ClassicKind {
    ClassicShape shape = ClassicShape::Palindromic;
    std::size_t j = 0;  ///< leading zeros of the j-palindromic shape
    Dyadic b;           ///< ratio of the geometric shapes, in (0, 1/2]
};

struct ClassicViolation {
    std::vector<std::int64_t> coeffs;
    std::int64_t threshold2 = 0;
    StateWindow init;
    std::uint64_t period = 0;
};

struct ClassicReport {
    ClassicKind kind;
    std::size_t k = 0;
    std::uint64_t trials = 0;
    std::set<std::uint64_t> periods_seen;
    std::vector<ClassicViolation> violations;
    bool pass = false;
};

inline std::string shape_name(ClassicShape s) {
    switch (s) {
        case ClassicShape::Palindromic: return "palindromic";
        case ClassicShape::JPalindromic: return "j-palindromic";
        case ClassicShape::GeometricNeg: return "geometric-neg";
        case ClassicShape::GeometricPos: return "geometric-pos";
    }
    return "unknown";
}

namespace detail {

// Unbiased enough for test generation and, unlike std distributions, identical
// across standard libraries.
inline std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng() % span);
}

inline bool claim_holds(ClassicShape shape, std::size_t k, std::size_t j, std::uint64_t period) {
    switch (shape) {
        case ClassicShape::Palindromic: return (k + 1) % period == 0;
        case ClassicShape::JPalindromic: return (k + j + 1) % period == 0;
        case ClassicShape::GeometricNeg: return period <= k + 1;
        case ClassicShape::GeometricPos: return period == 1;
    }
    return false;
}

}  // namespace detail

/// Randomized check of the classic cycle-length results for palindromic,
/// j-palindromic and geometric memories. Geometric coefficients +-b^i are scaled
/// by 2^(e k) so they are exact integers; thresholds are drawn on the same grid.
inline ClassicReport classic_check(const ClassicKind& kind, std::size_t k, std::uint64_t trials, std::uint64_t seed,
                                   std::uint64_t max_steps = kDefaultMaxSteps) {
    if (k < 1) throw InvalidShapeParam("memory must be at least 1");
    if (trials < 1) throw InvalidShapeParam("need at least one trial");
    const bool geometric = kind.shape == ClassicShape::GeometricNeg || kind.shape == ClassicShape::GeometricPos;
    if (kind.shape == ClassicShape::JPalindromic && (kind.j < 1 || kind.j >= k))
        throw InvalidShapeParam("j must satisfy 1 <= j < k");
    std::vector<std::int64_t> geo;
    if (geometric) {
        const auto& b = kind.b;
        if (b.numerator < 1 || b.exponent < 1 || b.exponent > 62 ||
            2 * b.numerator > (std::uint64_t{1} << b.exponent))
            throw InvalidShapeParam("geometric ratio must lie in (0, 1/2]");
        // b^i * 2^(e k) = num^i * 2^(e (k - i))
        for (std::size_t i = 1; i <= k; ++i) {
            __int128 v = 1;
            for (std::size_t q = 0; q < i; ++q) v *= b.numerator;
            for (std::size_t q = 0; q < b.exponent * (k - i); ++q) v *= 2;
            if (v > (static_cast<__int128>(1) << 56)) throw InvalidShapeParam("scaled geometric coefficients overflow");
            geo.push_back(static_cast<std::int64_t>(v));
        }
    }

    ClassicReport r;
    r.kind = kind;
    r.k = k;
    r.trials = trials;
    std::mt19937_64 rng(seed);
    constexpr std::int64_t kRange = 8;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        std::vector<std::int64_t> a(k, 0);
        std::int64_t threshold2 = 0;
        switch (kind.shape) {
            case ClassicShape::Palindromic:
                for (std::size_t i = 0; i < (k + 1) / 2; ++i) a[i] = a[k - 1 - i] = detail::uniform(rng, -kRange, kRange);
                threshold2 = detail::uniform(rng, -kRange * static_cast<std::int64_t>(k), kRange * static_cast<std::int64_t>(k));
                break;
            case ClassicShape::JPalindromic:
                // a_i = a_{k+j+1-i} for j+1 <= i <= k, zero below
                for (std::size_t i = kind.j + 1; i <= k; ++i) {
                    const std::size_t mirror = k + kind.j + 1 - i;
                    if (mirror < i) break;
                    a[i - 1] = a[mirror - 1] = detail::uniform(rng, -kRange, kRange);
                }
                threshold2 = detail::uniform(rng, -kRange * static_cast<std::int64_t>(k), kRange * static_cast<std::int64_t>(k));
                break;
            case ClassicShape::GeometricNeg:
            case ClassicShape::GeometricPos: {
                std::int64_t total = 0;
                const std::int64_t sign = kind.shape == ClassicShape::GeometricNeg ? -1 : 1;
                for (std::size_t i = 0; i < k; ++i) {
                    a[i] = sign * geo[i];
                    total += geo[i];
                }
                threshold2 = sign * detail::uniform(rng, -1, total + 1);
                break;
            }
        }
        StateWindow init(k);
        for (std::size_t i = 0; i < k; ++i) init.set(i, (rng() >> 17) & 1U);
        const NeuronEquation eq(a, threshold2);
        const auto c = detect_cycle(eq, init, max_steps);
        r.periods_seen.insert(c.period);
        if (!detail::claim_holds(kind.shape, k, kind.j, c.period))
            r.violations.push_back({a, threshold2, init, c.period});
    }
    r.pass = r.violations.empty();
    return r;
}

struct SweepRow {
    std::size_t d = 0;
    std::vector<std::int64_t> surviving;
    std::set<std::uint64_t> predicted;
    std::map<std::uint64_t, std::uint64_t> observed;  ///< period -> sample count
    bool contained = false;
    AttainmentReport attainment;
};

struct SweepReport {
    std::int64_t m = 0;
    std::int64_t theta = 0;
    std::uint64_t samples_per_d = 0;
    std::uint64_t seed = 0;
    std::vector<SweepRow> rows;
    bool nested = false;       ///< observed period sets non-increasing in d
    bool ends_fixed = false;   ///< last row observes only period 1
    bool pass = false;
};

inline constexpr std::int64_t kSweepMinM = 8;  // smallest integer m >= e^2

/// Sampled census and attainment for every member z(n, d), d = 0 .. s-1.
inline SweepReport bifurcation_sweep(const ConstructionParams& p, std::uint64_t samples_per_d, std::uint64_t seed,
                                     std::uint64_t max_steps = kDefaultMaxSteps, unsigned workers = 1) {
    if (p.m < kSweepMinM) throw MTooSmall(p.m);
    if (samples_per_d < 1) throw ParameterError("need at least one sample per d");
    SweepReport r;
    r.m = p.m;
    r.theta = p.theta;
    r.samples_per_d = samples_per_d;
    r.seed = seed;
    bool all = true;
    for (std::size_t d = 0; d < p.s(); ++d) {
        SweepRow row;
        row.d = d;
        row.surviving = surviving_primes(p, d);
        row.predicted = admissible_periods(p, row.surviving);
        const auto census = sampled_census(build_z(p, d), samples_per_d, seed + d, max_steps, workers);
        row.observed = census.chi;
        row.contained = verify_period_support(census, row.predicted).pass;
        row.attainment = verify_attainment(p, d, max_steps);
        all = all && row.contained && row.attainment.pass;
        r.rows.push_back(std::move(row));
    }
    r.nested = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        for (const auto& [period, count] : r.rows[i].observed)
            if (!r.rows[i - 1].observed.contains(period)) r.nested = false;
    r.ends_fixed = !r.rows.empty() && r.rows.back().observed.size() == 1 && r.rows.back().observed.contains(1);
    r.pass = all && r.nested && r.ends_fixed;
    return r;
}

struct Lemma2Suite {
    std::uint64_t seed = 0;
    std::vector<CompositionReport> cases;
    std::size_t nonzero_transient_cases = 0;
    bool pass = false;
};

/// Seeded composition cases over the coef1 systems m = 3, 4, 5. Each case
/// puts windows drawn from the basins of distinct attractors (or only the null
/// attractor) into g slots; the slot with the longest transient occupies the
/// last residue, which is the arrangement whose composed transient is g max T_j.
inline Lemma2Suite lemma2_suite(std::uint64_t seed, std::size_t n_cases) {
    struct Base {
        NeuronEquation eq;
        std::vector<std::vector<std::pair<StateWindow, std::uint64_t>>> pools;  // per attractor, pools[0] null
    };
    std::vector<Base> bases;
    for (std::int64_t m : {3, 4, 5}) {
        const auto p = derive_params(m, m == 5 ? 12 : 2 * m);
        Base b{build_coef1(p), {}};
        std::vector<StateWindow> on_cycle{StateWindow(static_cast<std::size_t>(p.k))};
        for (std::size_t i = 0; i < p.s(); ++i) on_cycle.push_back(canonical_initial(p, i));
        for (const auto& w : on_cycle) {
            auto pool = basin_walk(b.eq, w, 4096);
            std::vector<std::pair<StateWindow, std::uint64_t>> deep;
            for (auto& e : pool)
                if (e.second > 0) deep.push_back(std::move(e));
            b.pools.push_back(deep.empty() ? std::move(pool) : std::move(deep));
        }
        bases.push_back(std::move(b));
    }

    Lemma2Suite out;
    out.seed = seed;
    std::mt19937_64 rng(seed);
    bool all = true;
    for (std::size_t c = 0; c < n_cases; ++c) {
        const Base& base = bases[c % bases.size()];
        const std::size_t n_attr = base.pools.size();
        std::vector<std::size_t> attractors;
        if (c % 5 == 4) {
            const std::size_t g = 2 + static_cast<std::size_t>(rng() % 2);
            attractors.assign(g, 0);
        } else {
            std::vector<std::size_t> order(n_attr);
            for (std::size_t i = 0; i < n_attr; ++i) order[i] = i;
            for (std::size_t i = n_attr; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
            const std::size_t g = n_attr >= 3 ? 2 + static_cast<std::size_t>(rng() % 2) : 2;
            attractors.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(g));
        }
        std::vector<std::pair<StateWindow, std::uint64_t>> slots;
        for (auto a : attractors) {
            const auto& pool = base.pools[a];
            slots.push_back(pool[rng() % pool.size()]);
        }
        std::size_t deepest = 0;
        for (std::size_t i = 1; i < slots.size(); ++i)
            if (slots[i].second > slots[deepest].second) deepest = i;
        std::swap(slots[deepest], slots.back());
        std::vector<StateWindow> windows;
        for (auto& s : slots) windows.push_back(s.first);
        auto report = verify_composition_law(base.eq, windows);
        if (*std::max_element(report.slot_transients.begin(), report.slot_transients.end()) > 0)
            ++out.nonzero_transient_cases;
        all = all && report.pass;
        out.cases.push_back(std::move(report));
    }
    out.pass = all;
    return out;
}

struct Lemma3Trial {
    std::int64_t a = 0, ell1 = 1, b = 0, ell2 = 1;
    CommonSpike spike{};
    std::int64_t crt_min = 0;
    bool ok = false;
};

struct Lemma3Suite {
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::vector<Lemma3Trial> failures;
    bool pass = false;
};

/// Random coprime steps in [1, 100] and offsets in [0, 1000]: the i0/j0 witness
/// must be nonnegative, satisfy both congruences and agree with the brute-force
/// CRT solution modulo ell1 * ell2.
inline Lemma3Suite lemma3_suite(std::uint64_t trials, std::uint64_t seed) {
    Lemma3Suite out;
    out.seed = seed;
    out.trials = trials;
    std::mt19937_64 rng(seed);
    for (std::uint64_t n = 0; n < trials; ++n) {
        Lemma3Trial t;
        do {
            t.ell1 = detail::uniform(rng, 1, 100);
            t.ell2 = detail::uniform(rng, 1, 100);
        } while (std::gcd(t.ell1, t.ell2) != 1);
        t.a = detail::uniform(rng, 0, 1000);
        t.b = detail::uniform(rng, 0, 1000);
        t.spike = common_spike(t.a, t.ell1, t.b, t.ell2);
        t.crt_min = *crt_min_brute(t.a, t.ell1, t.b, t.ell2);
        const auto& s = t.spike;
        t.ok = s.i0 >= 0 && s.j0 >= 0 && s.t == t.a + s.i0 * t.ell1 && s.t == t.b + s.j0 * t.ell2 &&
               s.t % t.ell1 == t.a % t.ell1 && s.t % t.ell2 == t.b % t.ell2 &&
               (s.t - t.crt_min) % (t.ell1 * t.ell2) == 0 && s.n1 * t.ell1 + s.n2 * t.ell2 == 1;
        if (!t.ok) out.failures.push_back(t);
    }
    out.pass = out.failures.empty();
    return out;
}

}  // namespace nre
