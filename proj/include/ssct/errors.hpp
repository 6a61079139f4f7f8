#pragma once

#include <stdexcept>
#include <string>

namespace ssct {

// Invalid parameter combinations (tiling/config validation). CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatches: non-square fields, coefficient/mask size disagreement.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed SSCT raw files: bad magic, truncated payload, unknown dtype.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation invoked on an object missing required state (e.g. gradients).
class StateError : public std::runtime_error {
public:
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failures (degenerate variance, violated conservation).
// CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ssct
