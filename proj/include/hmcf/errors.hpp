#pragma once

#include <stdexcept>
#include <string>

namespace hmcf {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometry construction and validation failures.
struct NonConvexError : Error {
    explicit NonConvexError(const std::string& msg) : Error(msg) {}
};
struct SingularMetricError : Error {
    explicit SingularMetricError(const std::string& msg) : Error(msg) {}
};
struct NegativeRadiusError : Error {
    explicit NegativeRadiusError(const std::string& msg) : Error(msg) {}
};

// Parallel-family failures.
struct ReachExceededError : Error {
    explicit ReachExceededError(const std::string& msg) : Error(msg) {}
};
struct RootBracketError : Error {
    explicit RootBracketError(const std::string& msg) : Error(msg) {}
};
struct InradExceedsRadiusError : Error {
    explicit InradExceedsRadiusError(const std::string& msg) : Error(msg) {}
};

// Audit preconditions.
struct NotHConvexError : Error {
    explicit NotHConvexError(const std::string& msg) : Error(msg) {}
};

// Bad run configuration (CLI / config files).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace hmcf
