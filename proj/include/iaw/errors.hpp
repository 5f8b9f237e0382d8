#pragma once

#include <stdexcept>
#include <string>

namespace iaw {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid physical constants or grid sizes.
struct param_error : error {
    using error::error;
};

// Mismatched grids / series orders between operands.
struct shape_error : error {
    using error::error;
};

// Non-finite values produced by a numeric kernel.
struct numeric_error : error {
    using error::error;
};

// Antiderivative requested for an integrand with a non-negligible mean.
struct integrability_error : error {
    using error::error;
};

// A hierarchy step could not be completed (missing time-derivative depth,
// non-decaying forcing, inconsistent stage data).
struct hierarchy_error : error {
    using error::error;
};

// Newton iteration for the nonlinear Poisson equation failed.
struct elliptic_error : error {
    using error::error;
};

// Time integration failed (blow-up, positivity loss, CFL violation).
struct integration_error : error {
    using error::error;
};

// Malformed configuration file or command line.
struct config_error : error {
    using error::error;
};

} // namespace iaw
