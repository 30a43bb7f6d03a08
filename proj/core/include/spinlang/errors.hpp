#pragma once

#include <stdexcept>
#include <string>

namespace spinlang {

// Each error class maps onto one CLI exit code (see tools/spinlang.cpp).
// Plain precondition violations on library calls use std::invalid_argument.

/// Invalid experiment configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file (exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number of the offending line.
class ParseError : public IoError {
public:
    ParseError(std::size_t line, const std::string& what)
        : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Oracle state space exceeds the enumeration guard (exit code 4).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its tolerance (exit code 5).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spinlang
