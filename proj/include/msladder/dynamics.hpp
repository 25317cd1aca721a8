// Time propagation of i dC/dt = H(t) C in the original and MS bases.
#pragma once

#include <functional>
#include <string>

#include "msladder/decompose.hpp"
#include "msladder/ladder.hpp"

namespace msl {

enum class BasisTag { original, ms };

// Complex amplitudes sampled on a uniform time grid; one column per sample.
struct Trajectory {
  RealVector times;
  ComplexMatrix amplitudes;  // dimension x sample_count
  BasisTag basis = BasisTag::original;
};

enum class IntegrationMethod { rk4_fixed, rk45_adaptive };

struct PropagatorConfig {
  double t_start = 0.0;
  double t_end = 1.0;
  IntegrationMethod method = IntegrationMethod::rk45_adaptive;
  double step = 1e-2;    // rk4_fixed step size
  double rtol = 1e-10;   // rk45_adaptive relative tolerance
  double atol = 1e-13;   // rk45_adaptive absolute tolerance
  int sample_count = 201;
};

using HamiltonianFn = std::function<ComplexMatrix(double)>;

// Integrates the Schroedinger equation for an arbitrary Hermitian H(t) and
// samples the solution on the uniform grid. Adaptive stepping uses an
// embedded Dormand-Prince 5(4) pair; StepFailure signals a step-size
// underflow. The fixed-step variant exists for convergence studies.
Trajectory integrate_schrodinger(const HamiltonianFn& hamiltonian,
                                 const ComplexVector& initial,
                                 const PropagatorConfig& config);

// Propagation of a full ladder system in the original basis.
Trajectory propagate(const LadderSystem& system, const ComplexVector& initial,
                     const PropagatorConfig& config);

// Propagation in the MS basis: maps the initial state with S, integrates each
// chain with its small tridiagonal Hamiltonian, and advances dark states by
// their analytic detuning phase. `initial` is given in the original basis.
Trajectory propagate_decomposed(const DecompositionReport& report,
                                const LadderSystem& system,
                                const ComplexVector& initial,
                                const PropagatorConfig& config);

struct BasisComparison {
  double max_state_deviation = 0.0;       // max_t ||S C_orig(t) - C_ms(t)||
  double max_population_deviation = 0.0;
  RealVector per_state_population_deviation;
};

// Verifies that two independently propagated trajectories describe the same
// dynamics once mapped through the transformation. Throws GridMismatch when
// the time grids differ.
BasisComparison compare_bases(const Trajectory& original, const Trajectory& ms,
                              const MsTransformation& transformation);

// max_t | ||C(t)|| - ||C(0)|| | / ||C(0)||
double norm_drift(const Trajectory& trajectory);

// CSV with header "t, re_c1, im_c1, ..." and 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);

}  // namespace msl
