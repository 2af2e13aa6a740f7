#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etaxi {

/// Invalid or inconsistent configuration (scenario keys, generator specs,
/// clustering parameters). Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data (unreadable files, malformed rows, empty datasets).
/// Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A row-level parse failure; carries the 1-based line number.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Queue with utilization rho = lambda / (s mu) >= 1 has no steady state.
class UnstableQueueError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Formula evaluated at a removable or genuine singularity.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A simulation invariant failed. Always a bug.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace etaxi
