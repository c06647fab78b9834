#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace entgap {

/// Caller supplied something outside an operation's domain (bad shape,
/// unnormalized state, invalid permutation, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine failed to deliver its contract (non-convergence,
/// eigenvalue well below zero, reconstruction failure).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Short numeric rendering for diagnostics.
inline std::string describe_value(double x) {
  std::ostringstream out;
  out.precision(3);
  out << x;
  return out.str();
}

}  // namespace entgap
