// Exception taxonomy. Every failure mode reported by the library has its own type.
#pragma once

#include <stdexcept>
#include <string>

namespace msl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotHermitian : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NotCommuting : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct RankTooLarge : Error { using Error::Error; };
struct NotUnitary : Error { using Error::Error; };
struct InvalidSystem : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct InvalidQuantumNumbers : Error { using Error::Error; };
struct InvalidTransition : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct PreconditionFailed : Error { using Error::Error; };
struct UnknownExample : Error { using Error::Error; };

// The coupling structure admits no MS factorization. Carries the offending
// interior level (or transition) index and the scaled residual that tripped.
struct NotDecomposable : Error {
  int level;
  double residual;
  NotDecomposable(const std::string& msg, int level_, double residual_)
      : Error(msg), level(level_), residual(residual_) {}
};

}  // namespace msl
