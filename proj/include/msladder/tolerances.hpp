// Numerical tolerance configuration shared across the library.
#pragma once

#include <string>

namespace msl {

// All thresholds are relative to a problem-dependent scale unless noted.
struct Tolerances {
  double herm = 1e-12;       // Hermiticity residual, relative to ||A||_F
  double degen = 1e-8;       // eigenvalue grouping, relative to the spectral radius
  double unitary = 1e-10;    // unitarity residual
  double eig = 1e-10;        // eigen-residual and PSD acceptance
  double commute = 1e-10;    // scaled commutator acceptance
  double offdiag = 1e-10;    // diagonality acceptance after conjugation
  double null_link = 1e-10;  // couplings below null_link*||V||_F count as absent
  double abs_floor = 1e-14;  // absolute fallback scale for near-zero matrices
};

// Partial overrides from a JSON object, e.g. {"commute": 1e-8}.
// Unknown keys raise SchemaError.
Tolerances tolerances_from_json(const std::string& text, Tolerances base = {});
Tolerances tolerances_from_file(const std::string& path, Tolerances base = {});
std::string tolerances_to_json(const Tolerances& tol);

}  // namespace msl
