#pragma once

#include <stdexcept>
#include <string>

namespace treeloss {

/// Malformed or contradictory run configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

/// A request that would exceed the enumeration or simulation budget.
/// The CLI maps this to exit code 3.
class ResourceLimitError : public std::runtime_error {
public:
    explicit ResourceLimitError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace treeloss
