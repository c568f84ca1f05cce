#pragma once

// Periodic 0-1 sequences seen through their support in Z_T: translation
// period of the support, complete l-chains, and the common-spike witness
// built from a Bezout pair.

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nre/error.hpp"
#include "nre/number_theory.hpp"

namespace nre {

class PeriodicBinarySequence {
public:
    PeriodicBinarySequence(std::uint64_t modulus, std::set<std::uint64_t> support)
        : modulus_(modulus), support_(std::move(support)) {
        if (modulus_ < 1) throw ParameterError("sequence modulus must be positive");
        if (!support_.empty() && *support_.rbegin() >= modulus_)
            throw ParameterError("support residue outside [0, T)");
        mask_.assign(modulus_, 0);
        for (auto t : support_) mask_[t] = 1;
    }

    /// One period of bits, word[t] = y(t).
    static PeriodicBinarySequence from_word(std::span<const std::uint8_t> word) {
        std::set<std::uint64_t> support;
        for (std::size_t t = 0; t < word.size(); ++t)
            if (word[t]) support.insert(t);
        return {word.size(), std::move(support)};
    }

    std::uint64_t modulus() const noexcept { return modulus_; }
    const std::set<std::uint64_t>& support() const noexcept { return support_; }

    /// y(t) for any integer t.
    bool at(std::int64_t t) const {
        const auto T = static_cast<std::int64_t>(modulus_);
        return mask_[static_cast<std::size_t>(((t % T) + T) % T)] != 0;
    }

    /// Whether support + shift == support (mod T).
    bool invariant_under(std::uint64_t shift) const {
        shift %= modulus_;
        for (auto t : support_)
            if (!mask_[(t + shift) % modulus_]) return false;
        return true;
    }

private:
    std::uint64_t modulus_;
    std::set<std::uint64_t> support_;
    std::vector<std::uint8_t> mask_;
};

/// An arithmetic progression {offset + step*l mod T} inside the support.
/// `length` empty means the whole +step orbit of `offset` is in the support.
struct ChainWitness {
    std::uint64_t offset_t = 0;
    std::uint64_t step_ell = 1;
    std::optional<std::uint64_t> length_s;

    bool complete() const noexcept { return !length_s.has_value(); }
    friend bool operator==(const ChainWitness&, const ChainWitness&) = default;
};

/// Smallest gamma >= 1 with support + gamma = support. Always divides T.
inline std::uint64_t set_period(const PeriodicBinarySequence& seq) {
    const std::uint64_t T = seq.modulus();
    for (std::uint64_t g = 1; g < T; ++g)
        if (T % g == 0 && seq.invariant_under(g)) return g;
    return T;
}

inline bool divides_iff_shift(const PeriodicBinarySequence& seq, std::uint64_t k) {
    if (k < 1) throw ParameterError("shift must be at least 1");
    return seq.invariant_under(k);
}

/// Longest finite ell-chain starting at `offset` (capped at T elements).
inline ChainWitness longest_chain_at(const PeriodicBinarySequence& seq, std::uint64_t offset,
                                     std::uint64_t ell) {
    const std::uint64_t T = seq.modulus();
    const std::uint64_t orbit = T / std::gcd(ell, T);
    std::uint64_t len = 0;
    while (len < orbit && seq.at(static_cast<std::int64_t>((offset + ell * len) % T))) ++len;
    if (len == orbit) return {offset % T, ell, std::nullopt};
    return {offset % T, ell, len};
}

/// One COMPLETE witness per +ell orbit of Z_T lying entirely in the support.
/// Orbit representatives are the residues 0 .. gcd(ell, T) - 1.
inline std::vector<ChainWitness> find_complete_chains(const PeriodicBinarySequence& seq,
                                                      std::uint64_t ell) {
    if (ell < 1) throw ParameterError("chain step must be at least 1");
    const std::uint64_t T = seq.modulus();
    const std::uint64_t g = std::gcd(ell, T);
    std::vector<ChainWitness> out;
    for (std::uint64_t a = 0; a < g; ++a) {
        bool whole = true;
        for (std::uint64_t r = a; r < T && whole; r += g) whole = seq.at(static_cast<std::int64_t>(r));
        if (whole) out.push_back({a, ell, std::nullopt});
    }
    return out;
}

struct CommonSpike {
    std::int64_t t;   ///< a + i0 * ell1 = b + j0 * ell2
    std::int64_t i0;
    std::int64_t j0;
    std::int64_t n1;  ///< Bezout pair n1*ell1 + n2*ell2 = 1
    std::int64_t n2;
};

/// Common point of the progressions a + i*ell1 and b + j*ell2 with i0, j0 >= 0:
///   i0 = n1(b-a) + (1 + |n1(b-a)| + |n2(b-a)|) ell2
///   j0 = -n2(b-a) + (1 + |n1(b-a)| + |n2(b-a)|) ell1
inline CommonSpike common_spike(std::int64_t a, std::int64_t ell1, std::int64_t b, std::int64_t ell2) {
    if (a < 0 || b < 0) throw ParameterError("chain offsets must be nonnegative");
    if (ell1 < 1 || ell2 < 1) throw ParameterError("chain steps must be positive");
    const Bezout bz = extended_gcd(ell1, ell2);
    if (bz.gcd != 1) throw NotCoprime(ell1, ell2);
    const std::int64_t diff = b - a;
    const std::int64_t u = bz.x * diff;
    const std::int64_t v = bz.y * diff;
    const std::int64_t c = 1 + std::llabs(u) + std::llabs(v);
    CommonSpike out{};
    out.n1 = bz.x;
    out.n2 = bz.y;
    out.i0 = u + c * ell2;
    out.j0 = -v + c * ell1;
    out.t = a + out.i0 * ell1;
    return out;
}

/// Smallest t >= 0 with t = a (mod ell1) and t = b (mod ell2), by scanning [0, ell1*ell2).
inline std::optional<std::int64_t> crt_min_brute(std::int64_t a, std::int64_t ell1, std::int64_t b,
                                                 std::int64_t ell2) {
    for (std::int64_t t = 0; t < ell1 * ell2; ++t)
        if (t % ell1 == a % ell1 && t % ell2 == b % ell2) return t;
    return std::nullopt;
}

/// A t with y(t) = y(t+ell1) = y(t+ell2) = 1 when the sequence carries complete
/// ell1- and ell2-chains; empty otherwise.
inline std::optional<std::int64_t> verify_lemma3(const PeriodicBinarySequence& seq,
                                                 std::int64_t ell1, std::int64_t ell2) {
    if (ell1 < 1 || ell2 < 1) throw ParameterError("chain steps must be positive");
    if (std::gcd(ell1, ell2) != 1) throw NotCoprime(ell1, ell2);
    const auto c1 = find_complete_chains(seq, static_cast<std::uint64_t>(ell1));
    const auto c2 = find_complete_chains(seq, static_cast<std::uint64_t>(ell2));
    if (c1.empty() || c2.empty()) return std::nullopt;
    const auto spike = common_spike(static_cast<std::int64_t>(c1.front().offset_t), ell1,
                                    static_cast<std::int64_t>(c2.front().offset_t), ell2);
    return spike.t;
}

struct ChainProfile {
    struct Entry {
        std::uint64_t step;
        std::vector<std::uint64_t> offsets;  ///< orbit representatives of complete chains
    };
    std::vector<Entry> chains;              ///< steps 1..k carrying a complete chain
    std::vector<std::int64_t> prime_steps;  ///< primes p_i dividing some chain step
    bool null_attractor = false;
    bool violation = false;
    std::string reason;
};

/// Complete chains for every step in [1, k] of an attractor word, flagged when a
/// non-null attractor carries chains for two distinct primes or a chain whose
/// step is a multiple of none of the `primes`.
inline ChainProfile attractor_chain_profile(std::span<const std::uint8_t> word,
                                            std::span<const std::int64_t> primes, std::uint64_t k) {
    ChainProfile out;
    const auto seq = PeriodicBinarySequence::from_word(word);
    out.null_attractor = seq.support().empty();
    if (out.null_attractor) return out;
    std::set<std::int64_t> prime_hits;
    for (std::uint64_t ell = 1; ell <= k; ++ell) {
        auto found = find_complete_chains(seq, ell);
        if (found.empty()) continue;
        ChainProfile::Entry e{ell, {}};
        for (const auto& w : found) e.offsets.push_back(w.offset_t);
        out.chains.push_back(std::move(e));
        bool multiple = false;
        for (auto p : primes)
            if (ell % static_cast<std::uint64_t>(p) == 0) {
                multiple = true;
                prime_hits.insert(p);
            }
        if (!multiple && !out.violation) {
            out.violation = true;
            out.reason = "complete chain of step " + std::to_string(ell) +
                         " is not a multiple of any construction prime";
        }
    }
    out.prime_steps.assign(prime_hits.begin(), prime_hits.end());
    if (!out.violation && out.prime_steps.size() != 1) {
        out.violation = true;
        out.reason = "non-null attractor carries chains for " +
                     std::to_string(out.prime_steps.size()) + " distinct primes";
    }
    return out;
}

}  // namespace nre
