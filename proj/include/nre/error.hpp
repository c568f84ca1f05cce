#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nre {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller-supplied parameter (usage error).
class ParameterError : public Error {
public:
    using Error::Error;
};

class WindowSizeError : public ParameterError {
public:
    WindowSizeError(std::size_t expected, std::size_t got)
        : ParameterError("window has " + std::to_string(got) + " bits, equation memory is " +
                         std::to_string(expected)) {}
};

class OverflowError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class NoPrimesInInterval : public ParameterError {
public:
    explicit NoPrimesInInterval(std::int64_t m)
        : ParameterError("no primes in the open interval (" + std::to_string(2 * m) + ", " +
                         std::to_string(3 * m) + ")") {}
};

class ThetaTooSmall : public ParameterError {
public:
    ThetaTooSmall(std::int64_t theta, std::int64_t m)
        : ParameterError("theta " + std::to_string(theta) + " is below 2m = " +
                         std::to_string(2 * m)) {}
};

class IndexOutOfRange : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class R1Collision : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class SOutOfRange : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class NotCoprime : public ParameterError {
public:
    NotCoprime(std::int64_t a, std::int64_t b)
        : ParameterError("steps " + std::to_string(a) + " and " + std::to_string(b) +
                         " are not coprime") {}
};

class InvalidShapeParam : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class MTooSmall : public ParameterError {
public:
    explicit MTooSmall(std::int64_t m)
        : ParameterError("m = " + std::to_string(m) + " is below the sweep bound m >= 8") {}
};

class CheckpointMismatch : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Resource guard tripped (state space too large, step budget exhausted).
class ResourceError : public Error {
public:
    using Error::Error;
};

class MemoryGuard : public ResourceError {
public:
    MemoryGuard(std::size_t k, std::size_t limit)
        : ResourceError("exact census of memory " + std::to_string(k) + " exceeds limit " +
                        std::to_string(limit)) {}
};

class CycleNotFound : public ResourceError {
public:
    explicit CycleNotFound(std::uint64_t max_steps, std::int64_t sample_index = -1)
        : ResourceError(describe(max_steps, sample_index)), sample_index_(sample_index) {}

    /// Index of the offending sample in a sampled census, -1 otherwise.
    std::int64_t sample_index() const noexcept { return sample_index_; }

private:
    static std::string describe(std::uint64_t max_steps, std::int64_t sample_index) {
        std::string msg = "no repeated window within " + std::to_string(max_steps) + " steps";
        if (sample_index >= 0) msg += " (sample " + std::to_string(sample_index) + ")";
        return msg;
    }
    std::int64_t sample_index_;
};

/// Raised when a census is stopped on request after writing its checkpoint.
class CensusInterrupted : public Error {
public:
    CensusInterrupted() : Error("census interrupted; checkpoint written") {}
};

}  // namespace nre
