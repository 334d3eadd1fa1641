#pragma once

#include <stdexcept>
#include <string>

namespace sk {

// Numerical-domain violations: argument outside the range a routine accepts.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Parameter-set violations: a model or family invariant does not hold.
struct InvalidParams : std::invalid_argument {
    explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

// A gamma-type pole was hit and the series does not terminate first.
struct PoleError : std::domain_error {
    explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

// A denominator Pochhammer vanished before a terminating sum finished.
struct DenominatorZero : std::domain_error {
    explicit DenominatorZero(const std::string& what) : std::domain_error(what) {}
};

// An iterative evaluation failed to meet its convergence certificate.
struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct SingularPoint : std::domain_error {
    explicit SingularPoint(const std::string& what) : std::domain_error(what) {}
};

struct UnsupportedKind : std::invalid_argument {
    explicit UnsupportedKind(const std::string& what) : std::invalid_argument(what) {}
};

// Bar-parameters fail the lattice condition or the sign conditions.
struct NotAcceptable : std::invalid_argument {
    explicit NotAcceptable(const std::string& what) : std::invalid_argument(what) {}
};

struct DimensionTooLarge : std::invalid_argument {
    explicit DimensionTooLarge(const std::string& what) : std::invalid_argument(what) {}
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct SchemeMismatch : std::invalid_argument {
    explicit SchemeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sk
