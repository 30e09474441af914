#pragma once

#include <stdexcept>
#include <string>

namespace ndhom {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Field construction / algebra
struct AliasError : Error { using Error::Error; };
struct CanonicalError : Error { using Error::Error; };
struct EllipticityError : Error { using Error::Error; };

// Periodic solves
struct PositivityError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct CompatibilityError : Error { using Error::Error; };

// Constructions
struct DomainError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct TraceError : Error { using Error::Error; };
struct UnknownNameError : Error { using Error::Error; };

// Dirichlet lab
struct SingularSystemError : Error { using Error::Error; };
struct SpecError : Error { using Error::Error; };

} // namespace ndhom
