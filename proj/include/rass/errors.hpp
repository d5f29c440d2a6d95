#pragma once

#include <stdexcept>

namespace rass {

// Bad or missing configuration and data files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver could not deliver a usable solution (infeasible window, limits hit).
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rass
