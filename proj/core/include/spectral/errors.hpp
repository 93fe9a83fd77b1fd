#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

// Base class for everything this library throws on bad input.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Inverse transform reconstructed a value outside {+1,-1}: the spectrum does
// not belong to a Boolean function.
struct NotBooleanError : Error {
    using Error::Error;
};

// top_two needs at least two nonzero coefficients.
struct TooSparseError : Error {
    using Error::Error;
};

// Operation requires spectral norm > 1 (input is +/- a character, or constant
// in the Z_p case).
struct NormOneError : Error {
    using Error::Error;
};

// A linear form must be nonzero.
struct ZeroFormError : Error {
    using Error::Error;
};

// Query oracle ran out of its allotted queries.
struct BudgetExhaustedError : Error {
    using Error::Error;
};

// Malformed parameters (k > n, even-n majority, eps out of range, ...).
struct ParamError : Error {
    using Error::Error;
};

// Text format violation; carries a 1-based line number.
struct ParseError : Error {
    ParseError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};

// A guarantee the synthesis/restriction machinery verifies at runtime failed.
// Thrown rather than silently loosened; a catch of this in a test is a bug.
struct CheckError : std::logic_error {
    explicit CheckError(const std::string& what) : std::logic_error(what) {}
};

inline void check(bool cond, const char* what) {
    if (!cond) throw CheckError(what);
}

}  // namespace spectral
