#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crowdcheck {

// Base class for all domain failures. The CLI maps these to exit code 2;
// usage/config problems are reported by the argument parser instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Header/column problems in tabular inputs.
class SchemaError : public Error {
public:
    using Error::Error;
};

// A malformed cell; carries the 1-based line number of the offending row.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Inconsistent or unusable data: duplicate keys, empty panels, unknown ids.
class DataError : public Error {
public:
    using Error::Error;
};

// Statistic preconditions violated: zero diversity, zero denominators,
// degenerate null models, constant inputs to a correlation.
class StatError : public Error {
public:
    using Error::Error;
};

// Skewness requested for a zero-diversity panel. Separate type so panel
// summaries can catch it and mark the field undefined instead of failing.
class UndefinedSkewError : public StatError {
public:
    using StatError::StatError;
};

} // namespace crowdcheck
