#pragma once

#include <stdexcept>
#include <string>

namespace mixedsel {

// Base class for all library-specific failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Omega_i could not be Cholesky-factorized (non-PD assembly, usually a sign
// of non-positive observation variances or NaN inputs).
struct FactorizationFailure : Error {
    using Error::Error;
};

// The GLS normal matrix is rank deficient (collinear fixed covariates).
struct SingularDesign : Error {
    using Error::Error;
};

struct InvalidPenaltyParams : Error {
    using Error::Error;
};

// The interior-point Newton matrix stayed singular after regularization.
struct NewtonSingular : Error {
    using Error::Error;
};

// The interior-point solver could not make progress.
struct SolverStalled : Error {
    using Error::Error;
};

struct MaxIterExceeded : Error {
    using Error::Error;
};

// Corrected AIC requested with n <= df + 1.
struct DegenerateSample : Error {
    using Error::Error;
};

struct InvalidSpec : Error {
    using Error::Error;
};

// CSV header does not match the expected schema.
struct SchemaError : Error {
    using Error::Error;
};

// CSV cell could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace mixedsel
