#pragma once

#include <stdexcept>
#include <string>

namespace erasure {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: out-of-range parameter, malformed file, schema violation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Fisher information or QFI evaluated at a point where the formula is singular.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

// The phase cannot be recovered from the data (zero information, no counts).
class EstimationError : public Error {
 public:
  using Error::Error;
};

// Too many invalid cycles in a simulated comparison.
class SimulationDegenerate : public Error {
 public:
  using Error::Error;
};

// Conic fit did not yield an ellipse.
class FitFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace erasure
