#pragma once

// Single neuron with memory: x(n) = 1(sum_j a_j x(n-j) - theta).
// Coefficients and threshold are held in doubled integer scale so that the
// half-integer values theta/2 +- alpha are exact.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nre/error.hpp"

namespace nre {

using Bits = std::vector<std::uint8_t>;

/// The k most recent samples of a trajectory. Bit (j-1) holds x(n-j), so
/// bit 0 is the most recent sample; read as an unsigned integer the window
/// value is sum_j x(n-j) 2^(j-1).
class StateWindow {
public:
    StateWindow() = default;
    explicit StateWindow(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

    static StateWindow from_u64(std::size_t length, std::uint64_t value) {
        if (length < 64 && (value >> length) != 0)
            throw ParameterError("window value does not fit in " + std::to_string(length) + " bits");
        StateWindow w(length);
        if (!w.words_.empty()) w.words_[0] = value;
        return w;
    }

    /// Oldest-first sample list x(0), ..., x(k-1) to the most-recent-first window.
    static StateWindow from_oldest_first(std::span<const std::uint8_t> samples) {
        StateWindow w(samples.size());
        const std::size_t k = samples.size();
        for (std::size_t t = 0; t < k; ++t)
            if (samples[t]) w.set(k - 1 - t, true);
        return w;
    }

    /// Parses the integer encoding written most-significant digit first.
    static StateWindow from_hex(std::size_t length, std::string_view hex) {
        StateWindow w(length);
        std::size_t bit = 0;
        for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
            const int nibble = hex_value(*it);
            if (nibble < 0) throw ParameterError("bad hex digit in window: " + std::string(hex));
            for (int b = 0; b < 4; ++b, ++bit) {
                if (((nibble >> b) & 1) == 0) continue;
                if (bit >= length)
                    throw ParameterError("hex window exceeds " + std::to_string(length) + " bits");
                w.set(bit, true);
            }
        }
        return w;
    }

    std::size_t size() const noexcept { return length_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    bool bit(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

    void set(std::size_t i, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (value)
            words_[i / 64] |= mask;
        else
            words_[i / 64] &= ~mask;
    }

    bool fits_u64() const noexcept { return length_ <= 64; }

    std::uint64_t to_u64() const {
        if (!fits_u64()) throw ParameterError("window longer than 64 bits has no u64 encoding");
        return words_.empty() ? 0 : words_[0];
    }

    std::size_t popcount() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool none() const noexcept {
        return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
    }

    /// Successor layout: every sample ages by one lag and `newest` enters at bit 0.
    void push(bool newest) {
        std::uint64_t carry = newest ? 1 : 0;
        for (auto& w : words_) {
            const std::uint64_t out = w >> 63;
            w = (w << 1) | carry;
            carry = out;
        }
        trim();
    }

    std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        const std::size_t n = (length_ + 3) / 4;
        std::string out(n, '0');
        for (std::size_t d = 0; d < n; ++d) {
            unsigned nibble = 0;
            for (std::size_t b = 0; b < 4; ++b) {
                const std::size_t i = d * 4 + b;
                if (i < length_ && bit(i)) nibble |= 1U << b;
            }
            out[n - 1 - d] = digits[nibble];
        }
        return out;
    }

    /// Samples oldest first, x(n-k) ... x(n-1).
    Bits oldest_first() const {
        Bits out(length_);
        for (std::size_t i = 0; i < length_; ++i) out[length_ - 1 - i] = bit(i) ? 1 : 0;
        return out;
    }

    friend bool operator==(const StateWindow&, const StateWindow&) = default;

    /// Integer order of the encodings.
    friend std::strong_ordering operator<=>(const StateWindow& a, const StateWindow& b) {
        if (auto c = a.length_ <=> b.length_; c != 0) return c;
        for (std::size_t i = a.words_.size(); i-- > 0;)
            if (auto c = a.words_[i] <=> b.words_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    static int hex_value(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    void trim() {
        if (length_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (length_ % 64)) - 1;
    }

    std::size_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

struct StateWindowHash {
    std::size_t operator()(const StateWindow& w) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ w.size();
        for (auto x : w.words()) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }
};

/// Immutable single-neuron recurrence. `coeffs[j-1]` is 2*a_j, `threshold2` is 2*theta.
class NeuronEquation {
public:
    NeuronEquation(std::vector<std::int64_t> coeffs_doubled, std::int64_t threshold2)
        : coeffs_(std::move(coeffs_doubled)), threshold2_(threshold2) {
        if (coeffs_.empty()) throw ParameterError("memory length must be at least 1");
        __int128 largest = 0;
        for (auto c : coeffs_) {
            if (c == std::numeric_limits<std::int64_t>::min())
                throw OverflowError("coefficient magnitude does not fit in int64");
            largest = std::max<__int128>(largest, c < 0 ? -static_cast<__int128>(c) : c);
        }
        if (threshold2_ == std::numeric_limits<std::int64_t>::min())
            throw OverflowError("threshold magnitude does not fit in int64");
        const __int128 bound = largest * static_cast<__int128>(coeffs_.size()) +
                               (threshold2_ < 0 ? -static_cast<__int128>(threshold2_) : threshold2_);
        if (bound > std::numeric_limits<std::int64_t>::max())
            throw OverflowError("memory * max|coefficient| + |threshold| exceeds int64 range");
    }

    std::size_t memory() const noexcept { return coeffs_.size(); }
    std::int64_t threshold2() const noexcept { return threshold2_; }
    std::span<const std::int64_t> coeffs() const noexcept { return coeffs_; }

    /// Doubled coefficient of lag j, 1 <= j <= memory().
    std::int64_t coeff(std::size_t lag) const { return coeffs_.at(lag - 1); }

    friend bool operator==(const NeuronEquation&, const NeuronEquation&) = default;

private:
    std::vector<std::int64_t> coeffs_;
    std::int64_t threshold2_;
};

namespace detail {

inline std::int64_t potential_word(std::span<const std::int64_t> coeffs, std::uint64_t bits,
                                   std::size_t base = 0) {
    std::int64_t sum = 0;
    while (bits != 0) {
        sum += coeffs[base + static_cast<std::size_t>(std::countr_zero(bits))];
        bits &= bits - 1;
    }
    return sum;
}

inline std::uint64_t low_mask(std::size_t k) {
    return k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
}

inline void check_window(const NeuronEquation& eq, const StateWindow& w) {
    if (w.size() != eq.memory()) throw WindowSizeError(eq.memory(), w.size());
}

}  // namespace detail

/// Sum of 2*a_j over the lags j whose sample is 1.
inline std::int64_t evaluate_potential(const NeuronEquation& eq, const StateWindow& w) {
    detail::check_window(eq, w);
    std::int64_t sum = 0;
    const auto words = w.words();
    for (std::size_t i = 0; i < words.size(); ++i)
        sum += detail::potential_word(eq.coeffs(), words[i], i * 64);
    return sum;
}

inline bool fires(const NeuronEquation& eq, const StateWindow& w) {
    return evaluate_potential(eq, w) - eq.threshold2() >= 0;
}

/// Output bit and successor window.
inline std::pair<std::uint8_t, StateWindow> step(const NeuronEquation& eq, StateWindow w) {
    const bool b = fires(eq, w);
    w.push(b);
    return {static_cast<std::uint8_t>(b), std::move(w)};
}

/// Output bits x(k), x(k+1), ... for `n_steps` iterations.
inline Bits simulate(const NeuronEquation& eq, const StateWindow& init, std::uint64_t n_steps) {
    detail::check_window(eq, init);
    Bits out;
    out.reserve(n_steps);
    StateWindow w = init;
    for (std::uint64_t n = 0; n < n_steps; ++n) {
        const bool b = fires(eq, w);
        w.push(b);
        out.push_back(b ? 1 : 0);
    }
    return out;
}

}  // namespace nre
