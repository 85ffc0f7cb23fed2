#pragma once

#include <stdexcept>
#include <string>

namespace sra {

/// Bad user-supplied parameter (maps to CLI exit code 2).
class invalid_parameter : public std::invalid_argument {
public:
    explicit invalid_parameter(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A closed form disagreed with its brute-force cross-check, or an internal
/// dimension bookkeeping assumption was violated.
class internal_consistency_error : public std::logic_error {
public:
    explicit internal_consistency_error(const std::string& msg) : std::logic_error(msg) {}
};

/// Runtime failure (maps to CLI exit code 1).
class runtime_failure : public std::runtime_error {
public:
    explicit runtime_failure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sra
