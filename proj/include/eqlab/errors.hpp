#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eqlab {

// Invalid configuration or arguments that violate a documented precondition.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during fiber propagation; carries the offending step.
struct PropagationError : std::runtime_error {
    PropagationError(const std::string& msg, std::size_t step_index_)
        : std::runtime_error(msg), step_index(step_index_) {}
    std::size_t step_index;
};

// Training aborted (e.g. NaN loss).
struct TrainError : std::runtime_error {
    explicit TrainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace eqlab
