#pragma once

#include <stdexcept>
#include <string>

namespace spinpair {

/// Invalid user input (bad quantum numbers, malformed files, nonphysical
/// parameters). The CLI maps this to exit code 2.
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical failure (non-finite intermediate, eigensolver breakdown,
/// non-convergence). The CLI maps this to exit code 3.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinpair
