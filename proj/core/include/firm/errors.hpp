#pragma once

#include <stdexcept>
#include <string>

namespace firm {

/// Base class for all errors raised by the firm library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A performance measure was requested on counts for which it is undefined
/// (zero denominator). Degenerate cases are surfaced, never mapped to a
/// sentinel value.
class UndefinedMeasureError : public Error {
public:
    using Error::Error;
};

/// A numerical root finder failed to converge. Carries the last bracket so
/// callers can diagnose or retry with different settings.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double bracket_lo, double bracket_hi)
        : Error(what), bracket_lo(bracket_lo), bracket_hi(bracket_hi) {}

    double bracket_lo;
    double bracket_hi;
};

/// Malformed input file (CSV dataset, contingency grid or JSON config).
/// `line` is 1-based; 0 means the location is not line-addressable.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}

    int line;
};

} // namespace firm
