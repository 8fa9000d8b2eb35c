#pragma once

#include <stdexcept>

namespace fctl {

// A model or intersection violates a stability / feasibility requirement
// (load >= 1, no positive slack, rounding breaks stability, ...).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iteration or quadrature failed to converge, a contour check failed,
// or a resource guard was exceeded.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed configuration input (CLI / JSON).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fctl
