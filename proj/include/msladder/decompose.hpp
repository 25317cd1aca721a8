// The Morris-Shore decomposition: a constant block-unitary change of basis
// that splits a degenerate laser-coupled ladder into independent
// nondegenerate sub-chains and uncoupled (dark) states.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msladder/ladder.hpp"
#include "msladder/linalg.hpp"

namespace msl {

// One unitary block per level; rows are the MS bras, so amplitudes map as
// C_ms = S C and operators as S H S^dag. The blocks are time independent:
// the common envelope of each coupling block factors out of their defining
// eigenproblems.
struct MsTransformation {
  std::vector<ComplexMatrix> blocks;
};

struct LambdaLink {
  double value = 0.0;  // real nonnegative MS coupling
  int row = 0;         // MS index within the lower level
  int col = 0;         // MS index within the upper level
};

// Transformed coupling block M_n = S_n V_n S_{n+1}^dag. After deleting null
// rows and columns it is diagonal up to permutation with real nonnegative
// entries; `lambda` lists those entries with their index pairs.
struct MsCouplingBlock {
  ComplexMatrix matrix;
  std::vector<LambdaLink> lambda;
  std::string envelope_id;
};

// One independent nondegenerate sub-chain. Members occupy consecutive levels;
// length 1 means a dark (uncoupled) state.
struct Chain {
  std::vector<std::pair<int, int>> members;  // (level, MS index within level)
  std::vector<double> link_couplings;        // length L-1, constant factors
  std::vector<std::string> link_envelopes;   // length L-1
  std::vector<double> detunings;             // length L, member-level detunings
  int length() const { return static_cast<int>(members.size()); }
};

// Chain count keyed by chain length (1 = dark state). Absent keys mean zero.
using Census = std::map<int, int>;

struct DecompositionReport {
  MsTransformation transformation;
  std::vector<MsCouplingBlock> coupling_blocks;
  std::vector<Chain> chains;
  Census census;
  std::vector<double> commutator_residuals;  // one per interior level

  ComplexMatrix full_transformation() const;  // block-diagonal S
  int total_dimension() const;
};

// Scaled commutator residual [V_{k-1}^dag V_{k-1}, V_k V_k^dag] for every
// interior level k, computed from constant parts only.
std::vector<double> interior_commutator_residuals(const LadderSystem& system,
                                                  const Tolerances& tol = {});

// Full N-level decomposition. Verifies the interior commutation conditions,
// builds the level blocks (interior levels by simultaneous diagonalization,
// end levels constructively from bright partners plus an orthonormal
// completion), extracts chains from the nonzero structure of the transformed
// coupling blocks, and orders everything canonically: within each level dark
// states come first, bright states follow in chain order; chains sort by
// length (longest first), then by descending couplings. Throws
// NotDecomposable when a commutation condition fails.
DecompositionReport decompose(const LadderSystem& system, const Tolerances& tol = {});

// Two-level decomposition straight from the singular value structure of V;
// an independent route kept deliberately separate from decompose().
DecompositionReport decompose_two_level(const ComplexMatrix& V, double detuning,
                                        const Tolerances& tol = {});

// S H(t) S^dag; equals the Hamiltonian assembled directly from the chains.
ComplexMatrix ms_hamiltonian(const DecompositionReport& report,
                             const LadderSystem& system, double t);

// The small tridiagonal Hamiltonian driving one chain at time t.
ComplexMatrix chain_hamiltonian(const Chain& chain, const LadderSystem& system, double t);

// Chain census of a three-level system from its degeneracies and rank data:
// lower/upper are the ranks of the two transformed coupling blocks, joint is
// the number of intermediate MS states bright towards both neighbours.
struct TransitionRanks {
  int lower = 0;
  int upper = 0;
  int joint = 0;
};
Census chain_census(const std::vector<int>& degeneracies, const TransitionRanks& ranks);

// Rank data of a generic maximally-linked compatible system.
TransitionRanks generic_ranks(const std::vector<int>& degeneracies);
Census generic_chain_census(const std::vector<int>& degeneracies);

// Reduction of a resonant equal-envelope ladder to one degenerate two-level
// problem: odd-position levels merge into the upper super-level, even ones
// into the lower. Requires (i) a single shared envelope and (ii) the
// two-photon resonance pattern (even-level detunings zero, odd-level
// detunings equal); PreconditionFailed names the violated condition.
struct QuasiReduction {
  LadderSystem merged;             // the two super-levels and bipartite coupling
  std::vector<int> merged_index;   // original global index -> merged global index
  DecompositionReport report;      // decomposition of the merged system
};
QuasiReduction quasi_two_level_reduce(const LadderSystem& system,
                                      const Tolerances& tol = {});

std::string report_to_json(const DecompositionReport& report);

}  // namespace msl
