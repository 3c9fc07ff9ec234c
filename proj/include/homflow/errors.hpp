#pragma once

#include <stdexcept>
#include <string>

namespace homflow {

// Bad shapes, non-finite entries, out-of-domain parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Principal logarithm requested for a rotation angle at (or too close to) pi.
class LogBranchError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Minimizing geodesic between the two points is not unique.
class GeodesicError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Not enough derivatives left on a field to build the requested operator.
class RegularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Combinatorial size guard (forest enumeration beyond the supported order).
class SizeGuardError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Iterative procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace homflow
