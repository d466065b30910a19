#pragma once

#include <stdexcept>
#include <string>

namespace ror {

/// Bad or inconsistent run configuration (missing files, invalid keys).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Defective input data (malformed CSV, non-positive flows, gaps).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical scheme failed to converge within its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ror
