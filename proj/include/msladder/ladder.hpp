// Degenerate N-level ladder systems and their RWA Hamiltonians.
//
// Conventions: hbar = 1, all energies and couplings in angular-frequency
// units, time in inverse frequency units. Coupling-block entries are the
// half-Rabi couplings that enter the Hamiltonian directly (Rabi frequency
// over two). Detunings are stored per level as the cumulative multiphoton
// detunings on the block diagonal; the first level defines the energy zero.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msladder/linalg.hpp"

namespace msl {

enum class EnvelopeKind { constant, gaussian, sin_squared };

// Scalar pulse shape f(t) shared by every element of one coupling block.
//   constant:    f(t) = amplitude
//   gaussian:    f(t) = amplitude * exp(-((t-center)/width)^2)
//   sin_squared: f(t) = amplitude * cos^2(pi (t-center)/width) on
//                |t-center| <= width/2, zero outside
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::constant;
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;  // unused for constant
  double value(double t) const;
};

struct LevelSet {
  std::string label;
  int degeneracy = 1;
  double detuning = 0.0;
};

struct CouplingBlock {
  ComplexMatrix constant_part;  // time-independent factor of the block
  std::string envelope_id;
  bool allow_null = false;  // set when an all-zero block is intentional
};

struct LadderSystem {
  std::vector<LevelSet> levels;            // length N >= 2
  std::vector<CouplingBlock> transitions;  // length N-1
  std::map<std::string, Envelope> envelopes;

  int total_dimension() const;
  int level_offset(int level) const;
  // Empty id evaluates to 1 (bare constant coupling).
  double envelope_value(const std::string& id, double t) const;
};

struct ValidationIssue {
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

ValidationReport validate(const LadderSystem& system);

// Block-tridiagonal Hermitian matrix of dimension sum(N_k): detunings times
// identity on the block diagonal, f_n(t) * V_n on the first superdiagonal,
// zero everywhere else. Throws InvalidSystem when validation fails.
ComplexMatrix assemble_hamiltonian(const LadderSystem& system, double t);

// JSON schema (UTF-8):
//   {"levels":      [{"label","degeneracy","detuning"}, ...],
//    "transitions": [{"matrix":[[[re,im],...],...], "envelope":"id"} |
//                    {"J_lower","J_upper","polarization":
//                       {"r":[re,im],"p":[re,im],"l":[re,im]}, "envelope":"id"}, ...],
//    "envelopes":   {"id": {"kind","amplitude","center","width"}, ...}}
// Complex entries are [re, im] pairs. Degeneracies and matrix shapes are
// cross-validated on load.
LadderSystem build_from_json(const std::string& text);
LadderSystem load_system(const std::string& path);

// Canonical serialization (matrix form, sorted keys). Feeds system_hash and
// the bundled example writer.
std::string system_to_json(const LadderSystem& system);

// FNV-1a over the canonical serialization; ties output files to their input.
std::uint64_t system_hash(const LadderSystem& system);

namespace detail {
ComplexMatrix assemble_unchecked(const LadderSystem& system, double t);
}

}  // namespace msl
