#pragma once

// Transient and period of a trajectory by first-repeat detection over the
// visited windows.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nre/equation.hpp"

namespace nre {

inline constexpr std::uint64_t kDefaultMaxSteps = 10'000'000;

struct CycleSummary {
    std::uint64_t transient = 0;
    std::uint64_t period = 0;
    StateWindow attractor_key;   ///< minimum window encoding on the cycle
    Bits attractor_bits;         ///< outputs of one period, starting from Y(T)
    StateWindow entry;           ///< Y(T), first window on the cycle
};

namespace detail {

// Open-addressing map u64 window -> first visit index. Slots are stamped with
// a generation counter so a reused table needs no clearing between calls.
class VisitIndex {
public:
    void reset() {
        if (++generation_ == 0) {
            std::fill(stamps_.begin(), stamps_.end(), 0);
            generation_ = 1;
        }
        count_ = 0;
        if (slots_.empty()) grow(1024);
    }

    /// Returns the earlier index of `key`, or inserts it at `index` and returns -1.
    std::int64_t find_or_insert(std::uint64_t key, std::uint64_t index) {
        if ((count_ + 1) * 2 > slots_.size()) rehash(slots_.size() * 2);
        std::size_t pos = hash(key) & (slots_.size() - 1);
        while (stamps_[pos] == generation_) {
            if (slots_[pos].key == key) return static_cast<std::int64_t>(slots_[pos].index);
            pos = (pos + 1) & (slots_.size() - 1);
        }
        stamps_[pos] = generation_;
        slots_[pos] = {key, index};
        ++count_;
        return -1;
    }

private:
    struct Slot {
        std::uint64_t key;
        std::uint64_t index;
    };

    static std::size_t hash(std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }

    void grow(std::size_t n) {
        slots_.assign(n, Slot{});
        stamps_.assign(n, 0);
    }

    void rehash(std::size_t n) {
        std::vector<Slot> live;
        live.reserve(count_);
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (stamps_[i] == generation_) live.push_back(slots_[i]);
        grow(n);
        generation_ = 1;
        count_ = 0;
        for (const auto& s : live) find_or_insert(s.key, s.index);
    }

    std::vector<Slot> slots_;
    std::vector<std::uint32_t> stamps_;
    std::uint32_t generation_ = 0;
    std::size_t count_ = 0;
};

inline std::pair<std::uint64_t, std::uint64_t> find_rho_u64(const NeuronEquation& eq,
                                                             std::uint64_t w,
                                                             std::uint64_t max_steps) {
    thread_local VisitIndex visited;
    visited.reset();
    const auto coeffs = eq.coeffs();
    const std::uint64_t mask = low_mask(eq.memory());
    for (std::uint64_t n = 0; n <= max_steps; ++n) {
        if (auto seen = visited.find_or_insert(w, n); seen >= 0) {
            const auto first = static_cast<std::uint64_t>(seen);
            return {first, n - first};
        }
        const bool b = potential_word(coeffs, w) - eq.threshold2() >= 0;
        w = ((w << 1) | (b ? 1U : 0U)) & mask;
    }
    throw CycleNotFound(max_steps);
}

inline std::pair<std::uint64_t, std::uint64_t> find_rho_generic(const NeuronEquation& eq,
                                                                 StateWindow w,
                                                                 std::uint64_t max_steps) {
    std::unordered_map<StateWindow, std::uint64_t, StateWindowHash> visited;
    for (std::uint64_t n = 0; n <= max_steps; ++n) {
        auto [it, inserted] = visited.try_emplace(w, n);
        if (!inserted) return {it->second, n - it->second};
        w.push(fires(eq, w));
    }
    throw CycleNotFound(max_steps);
}

}  // namespace detail

/// Minimal (T, p) with Y(T+p) = Y(T) for the window sequence started at `init`.
inline CycleSummary detect_cycle(const NeuronEquation& eq, const StateWindow& init,
                                 std::uint64_t max_steps = kDefaultMaxSteps) {
    detail::check_window(eq, init);
    if (max_steps < 1) throw ParameterError("max_steps must be at least 1");
    const auto [transient, period] = init.fits_u64()
                                         ? detail::find_rho_u64(eq, init.to_u64(), max_steps)
                                         : detail::find_rho_generic(eq, init, max_steps);
    CycleSummary out;
    out.transient = transient;
    out.period = period;
    StateWindow w = init;
    for (std::uint64_t n = 0; n < transient; ++n) w.push(fires(eq, w));
    out.entry = w;
    out.attractor_key = w;
    out.attractor_bits.reserve(period);
    for (std::uint64_t n = 0; n < period; ++n) {
        const bool b = fires(eq, w);
        w.push(b);
        out.attractor_bits.push_back(b ? 1 : 0);
        if (w < out.attractor_key) out.attractor_key = w;
    }
    return out;
}

/// Minimum encoding among the windows of the cycle through `on_cycle`.
inline StateWindow canonical_cycle_key(const NeuronEquation& eq, const StateWindow& on_cycle,
                                       std::uint64_t max_steps = kDefaultMaxSteps) {
    detail::check_window(eq, on_cycle);
    StateWindow key = on_cycle;
    StateWindow w = on_cycle;
    for (std::uint64_t n = 0; n < max_steps; ++n) {
        w.push(fires(eq, w));
        if (w == on_cycle) return key;
        if (w < key) key = w;
    }
    throw ParameterError("window does not return to itself within the step budget");
}

}  // namespace nre
