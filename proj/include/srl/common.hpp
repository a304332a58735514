#pragma once

#include <stdexcept>
#include <string>

namespace srl {

// Invalid user input: bad dimensions, malformed files, out-of-domain
// parameters. CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime numeric failure: divergence, quadrature non-convergence,
// bracketing failure. CLI exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tolerances shared across modules. Frozen so region tags, merges and
// reported bounds are deterministic.
inline constexpr double kAngularTol = 1e-12;        // same/antipodal direction test
inline constexpr double kCoefficientDropTol = 1e-14; // merged coefficients below this are zero
inline constexpr double kZeroCertTol = 1e-10;      // zero-function certificate tolerances
inline constexpr double kSqrtHalf = 0.70710678118654752440; // sqrt(2)/2 region boundary

inline constexpr int kModelFormatVersion = 1;

} // namespace srl
