#ifndef QREF_ERRORS_HPP
#define QREF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qref {

// Common base so callers can catch any library failure in one handler.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Model parameter outside its admissible domain.
struct ParameterError : Error {
  using Error::Error;
};

// Closed-form eigenbasis requested at g = 0 where the |02>/|11> pair is degenerate.
struct DegeneracyError : Error {
  using Error::Error;
};

// Operation mixing states expressed in different bases.
struct BasisMismatchError : Error {
  using Error::Error;
};

// Dissipative generator has more than one stationary direction.
struct NonErgodicError : Error {
  using Error::Error;
};

// A matrix block turned out defective, a state lost positivity, and similar breakdowns.
struct NumericalError : Error {
  using Error::Error;
};

// A trajectory never reached the requested threshold; carries the closest distance seen.
struct ConvergenceError : Error {
  double final_distance;
  ConvergenceError(const std::string& msg, double dist) : Error(msg), final_distance(dist) {}
};

// Crossing-time preconditions violated (candidate not initially farther than reference).
struct OrderingError : Error {
  using Error::Error;
};

// A claimed relaxation speedup failed one of its defining checks.
struct VerificationError : Error {
  using Error::Error;
};

// Malformed or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qref

#endif
