#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

/// Precondition violated by a physical input (non-positive field, r = r', ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature or contour construction failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root finding or trajectory shooting could not produce the required roots.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares fit did not converge or the data cannot constrain it.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdm
