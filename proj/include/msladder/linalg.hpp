// Dense complex linear algebra the rest of the library builds on: Hermitian
// eigensystems, simultaneous diagonalization of commuting Hermitian families,
// commutator residuals, and positive-semidefinite factorization.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "msladder/errors.hpp"
#include "msladder/tolerances.hpp"

namespace msl {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct IndexRange {
  int begin = 0;
  int end = 0;  // one past the last member
  int size() const { return end - begin; }
};

// Eigenvalues sorted descending. Eigenvectors are the columns of a unitary
// matrix; each column's first significant component is made real positive so
// the output is deterministic. degeneracy_groups partitions the index range
// into runs of eigenvalues that coincide within tol.degen (relative to the
// spectral radius, absolute once that drops below tol.abs_floor).
struct Eigensystem {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
  std::vector<IndexRange> degeneracy_groups;
};

// ||A - A^dag||_F / max(||A||_F, floor)
double hermiticity_residual(const ComplexMatrix& A);

// Rotate a vector's global phase so its first significant component is real
// positive. Deterministic tie-breaking for eigenvector and dark-state output.
void canonicalize_phase(Eigen::Ref<ComplexVector> v);

// ||U U^dag - 1||_F
double unitarity_residual(const ComplexMatrix& U);

// Largest |A_ij| over i != j.
double max_offdiagonal(const ComplexMatrix& A);

Eigensystem hermitian_eigensystem(const ComplexMatrix& A, const Tolerances& tol = {});

// Common eigenbasis of a family of commuting Hermitian matrices. The returned
// unitary U renders U*A_k*U^dag diagonal for every member (rows of U are the
// eigen-bras). The first member fixes the primary (descending) order; members
// further down the list only refine degenerate subspaces, again descending.
// Throws NotCommuting when some member cannot be diagonalized this way.
ComplexMatrix simultaneous_diagonalize(const std::vector<ComplexMatrix>& family,
                                       const Tolerances& tol = {});

// ||AB - BA||_F / max(||A||_F * ||B||_F, tol.abs_floor); zero iff A and B commute.
double commutator_residual(const ComplexMatrix& A, const ComplexMatrix& B,
                           const Tolerances& tol = {});

// Factor B (dim x cols) with B*B^dag = W, built as U*sqrt(Lambda) padded with
// zero columns. Throws NotPsd for a negative eigenvalue beyond tolerance and
// RankTooLarge when cols < rank(W).
ComplexMatrix psd_factor(const ComplexMatrix& W, int cols, const Tolerances& tol = {});

}  // namespace msl
