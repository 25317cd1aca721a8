// Construction of the commutant family: given a lower interaction, build all
// compatible upper intensity matrices, either as a matrix polynomial or from
// an arbitrary spectrum in the shared eigenbasis.
#pragma once

#include <optional>
#include <vector>

#include "msladder/angular.hpp"
#include "msladder/linalg.hpp"

namespace msl {

// One of two equivalent parametrizations of a Hermitian matrix commuting with
// `base`: polynomial coefficients in powers of base, or diagonal values in the
// eigenbasis of base. Exactly one must be supplied; lengths equal dim(base).
struct CommutingFamilySpec {
  ComplexMatrix base;
  std::optional<std::vector<double>> coefficients;
  std::optional<std::vector<double>> diagonal_values;
};

ComplexMatrix realize(const CommutingFamilySpec& spec, const Tolerances& tol = {});

// X = sum_n coeffs[n] * W1^n. Hermitian by construction and commuting with W1.
// coeffs.size() must equal dim(W1); higher powers are redundant anyway.
ComplexMatrix commuting_matrix_from_polynomial(const ComplexMatrix& W1,
                                               const std::vector<double>& coeffs,
                                               const Tolerances& tol = {});

// X = G^dag diag(xi) G for a unitary G (rows are the eigen-bras). Shares
// eigenvectors with every matrix G diagonalizes.
ComplexMatrix commuting_matrix_from_spectrum(const ComplexMatrix& G,
                                             const std::vector<double>& xi,
                                             const Tolerances& tol = {});

// Builds an upper coupling V2 (dim(W1) x upper_dim) with V2 V2^dag equal to
// the polynomial sum over W1 = V1^dag V1, so the assembled three-level system
// decomposes. NotPsd when the coefficients produce an invalid intensity
// matrix; RankTooLarge when upper_dim cannot carry its rank.
ComplexMatrix compatible_upper_coupling(const ComplexMatrix& V1,
                                        const std::vector<double>& coeffs,
                                        int upper_dim, const Tolerances& tol = {});

// Evaluation of the two polarization compatibility conditions for the
// J=3/2 - 1/2 - 1/2 ladder. Residuals are scaled by the quartic amplitude
// scale; `satisfied` holds when both stay below `threshold`. When
// |r1| != |l1|, forced_p2 carries the unique pi amplitude of the upper
// transition that makes the pair compatible for the given r2, l2.
struct ConditionVerdict {
  bool satisfied = false;
  double cond1_residual = 0.0;
  double cond2_residual = 0.0;
  std::optional<Complex> forced_p2;
};

ConditionVerdict check_example_conditions(const PolarizationTriple& pol1,
                                          const PolarizationTriple& pol2,
                                          double threshold = 1e-8);

}  // namespace msl
