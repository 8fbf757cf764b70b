#pragma once

#include <stdexcept>
#include <string>

namespace glucast {

// Error taxonomy shared by every module. The CLI maps these onto process
// exit codes: InputError/ShapeError -> 2, NumericError -> 3, ConfigError -> 4.

/// Dimension or length mismatch between operands.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unusable input data (files, rows, empty sequences).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerically undefined or diverging computation (NaN loss, zero variance).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent run configuration or unusable paths.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace glucast
