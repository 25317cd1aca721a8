// Clebsch-Gordan coefficients and dipole coupling blocks between angular
// momentum manifolds, plus the closed-form couplings of the
// J=3/2 - J=1/2 - J=1/2 ladder.
#pragma once

#include <array>
#include <utility>

#include "msladder/linalg.hpp"

namespace msl {

// Complex field amplitudes of the three polarization components driving one
// transition: r (sigma+, dM=+1), p (pi, dM=0), l (sigma-, dM=-1).
struct PolarizationTriple {
  Complex r{0.0, 0.0};
  Complex p{0.0, 0.0};
  Complex l{0.0, 0.0};
};

// <j1 m1; j2 m2 | j m> in the Condon-Shortley convention. Quantum numbers are
// passed as doubled integers (two_j = 2j) so half-integer momenta stay exact;
// supported range j <= 20. Selection-rule failures (m != m1+m2, triangle rule)
// return 0; malformed quantum numbers throw InvalidQuantumNumbers.
double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j, int two_m);

// Half-Rabi coupling block of a dipole transition J_lower -> J_upper driven
// with the given polarization amplitudes. Rows and columns are ordered by
// ascending magnetic quantum number; entry (M, M') carries the amplitude of
// the polarization component with q = M' - M weighted by
// <J_lower M; 1 q | J_upper M'>. Requires |J_upper - J_lower| <= 1.
ComplexMatrix build_coupling(int two_j_lower, int two_j_upper,
                             const PolarizationTriple& pol);

// Shorthands the closed-form couplings are expressed in.
struct PolarizationParameters {
  double epsilon = 0.0;  // (|l|^2 - |r|^2) / eta^2
  double xi = 0.0;       // |p|^2 / eta^2
  double eta = 0.0;      // sqrt(|l|^2 + |r|^2)
  double alpha = 0.0;    // arg(l* r* p^2)
};
// For eta == 0 the ratios above degenerate; epsilon, xi and alpha are then
// reported as 0 and the lambda evaluation special-cases that limit.
PolarizationParameters polarization_parameters(const PolarizationTriple& pol);

// The four MS couplings of the J=3/2 - 1/2 - 1/2 ladder, minus branch first.
struct LadderCouplings {
  std::array<double, 2> lower{};  // lower-transition pair
  std::array<double, 2> upper{};  // upper-transition pair
};
LadderCouplings j3212_lambdas(const PolarizationTriple& pol1,
                              const PolarizationTriple& pol2,
                              double f1 = 1.0, double f2 = 1.0);

// Explicit W1 = V1^dag V1 and W2 = V2 V2^dag of the same ladder, evaluated
// entrywise from the closed forms (not via build_coupling).
std::pair<ComplexMatrix, ComplexMatrix> j3212_w_matrices(
    const PolarizationTriple& pol1, const PolarizationTriple& pol2,
    double f1 = 1.0, double f2 = 1.0);

}  // namespace msl
