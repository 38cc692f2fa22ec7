#pragma once

#include <stdexcept>
#include <string>

namespace svcgp {

// Invalid user-facing configuration (bad grid spec, unknown preset, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (negative
// distance, |rho| >= 1, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure that survived the mitigation policy (factorization
// failed after maximal jitter, singular system, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data (CSV schema violations, duplicate keys, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sampler or chain failed its health checks (zero acceptance window).
struct DiagnosticsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace svcgp
