#pragma once

#include <stdexcept>
#include <string>

namespace sqt {

// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// A numerical method failed to deliver its contract (bracketing, convergence, underflow).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sqt
