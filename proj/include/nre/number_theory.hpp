#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "nre/error.hpp"

namespace nre {

/// All primes p with lo < p < hi, increasing (sieve of Eratosthenes).
inline std::vector<std::int64_t> primes_in_open_interval(std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> out;
    if (hi <= 2 || hi - lo < 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(hi), false);
    for (std::int64_t i = 2; i * i < hi; ++i)
        if (!composite[static_cast<std::size_t>(i)])
            for (std::int64_t j = i * i; j < hi; j += i) composite[static_cast<std::size_t>(j)] = true;
    for (std::int64_t p = std::max<std::int64_t>(lo + 1, 2); p < hi; ++p)
        if (!composite[static_cast<std::size_t>(p)]) out.push_back(p);
    return out;
}

struct Bezout {
    std::int64_t gcd;
    std::int64_t x;  ///< coefficient of the first argument
    std::int64_t y;  ///< coefficient of the second argument
};

/// gcd(a, b) = a*x + b*y for a, b >= 0.
inline Bezout extended_gcd(std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0) throw ParameterError("extended_gcd expects nonnegative arguments");
    std::int64_t old_r = a, r = b;
    std::int64_t old_s = 1, s = 0;
    std::int64_t old_t = 0, t = 1;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        old_r = std::exchange(r, old_r - q * r);
        old_s = std::exchange(s, old_s - q * s);
        old_t = std::exchange(t, old_t - q * t);
    }
    return {old_r, old_s, old_t};
}

inline std::uint64_t lcm_of(std::span<const std::uint64_t> values) {
    std::uint64_t acc = 1;
    for (auto v : values) acc = std::lcm(acc, v);
    return acc;
}

}  // namespace nre
