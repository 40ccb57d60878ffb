#pragma once

#include <stdexcept>
#include <string>

namespace smooco {

// Dimension disagreement between assignments, traffic vectors and the shape.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Invalid user-facing parameter (nonpositive period, |coeff| >= 1, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Search space too large for the requested exact strategy.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Linear algebra gave up (factorization failed after jitter escalation, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace smooco
