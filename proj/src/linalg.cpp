#include "msladder/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msl {

void canonicalize_phase(Eigen::Ref<ComplexVector> v) {
  const double n = v.norm();
  if (n == 0.0) return;
  int pick = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8 * n) {
      pick = static_cast<int>(i);
      break;
    }
  }
  if (pick < 0) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    pick = static_cast<int>(imax);
  }
  const Complex ph = v[pick] / std::abs(v[pick]);
  v *= std::conj(ph);
}

namespace {

std::vector<IndexRange> group_degenerate(const RealVector& vals, const Tolerances& tol) {
  std::vector<IndexRange> groups;
  if (vals.size() == 0) return groups;
  const double rho = vals.cwiseAbs().maxCoeff();
  const double thr = tol.degen * (rho < tol.abs_floor ? 1.0 : rho);
  int begin = 0;
  for (int i = 1; i < vals.size(); ++i) {
    if (std::abs(vals[i] - vals[i - 1]) > thr) {
      groups.push_back({begin, i});
      begin = i;
    }
  }
  groups.push_back({begin, static_cast<int>(vals.size())});
  return groups;
}

void require_square(const ComplexMatrix& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    std::ostringstream os;
    os << who << ": matrix must be square with dim >= 1, got " << A.rows() << "x" << A.cols();
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

double hermiticity_residual(const ComplexMatrix& A) {
  const double scale = std::max(A.norm(), 1e-300);
  return (A - A.adjoint()).norm() / scale;
}

double unitarity_residual(const ComplexMatrix& U) {
  return (U * U.adjoint() - ComplexMatrix::Identity(U.rows(), U.rows())).norm();
}

double max_offdiagonal(const ComplexMatrix& A) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (i != j) m = std::max(m, std::abs(A(i, j)));
  return m;
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& A, const Tolerances& tol) {
  require_square(A, "hermitian_eigensystem");
  const double res = hermiticity_residual(A);
  if (res > tol.herm) {
    std::ostringstream os;
    os << "hermitian_eigensystem: Hermiticity residual " << res << " exceeds " << tol.herm;
    throw NotHermitian(os.str());
  }

  // Symmetrize away the representable part of the asymmetry before solving.
  const ComplexMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eigensystem: eigen decomposition failed");
  }

  const int n = static_cast<int>(A.rows());
  Eigensystem out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // Eigen returns ascending order; flip to descending.
  for (int k = 0; k < n; ++k) {
    out.eigenvalues[k] = solver.eigenvalues()[n - 1 - k];
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    canonicalize_phase(out.eigenvectors.col(k));
  }
  out.degeneracy_groups = group_degenerate(out.eigenvalues, tol);
  return out;
}

ComplexMatrix simultaneous_diagonalize(const std::vector<ComplexMatrix>& family,
                                       const Tolerances& tol) {
  if (family.empty()) throw DimensionMismatch("simultaneous_diagonalize: empty family");
  const Eigen::Index n = family.front().rows();
  for (const auto& A : family) {
    require_square(A, "simultaneous_diagonalize");
    if (A.rows() != n) throw DimensionMismatch("simultaneous_diagonalize: mixed dimensions");
  }

  Eigensystem first = hermitian_eigensystem(family.front(), tol);
  ComplexMatrix basis = first.eigenvectors;  // columns
  std::vector<IndexRange> groups = first.degeneracy_groups;

  for (std::size_t m = 1; m < family.size(); ++m) {
    const ComplexMatrix& A = family[m];
    if (hermiticity_residual(A) > tol.herm) {
      throw NotHermitian("simultaneous_diagonalize: family member is not Hermitian");
    }
    std::vector<IndexRange> refined;
    for (const IndexRange& g : groups) {
      if (g.size() == 1) {
        refined.push_back(g);
        continue;
      }
      const ComplexMatrix sub = basis.middleCols(g.begin, g.size());
      ComplexMatrix B = sub.adjoint() * A * sub;
      B = 0.5 * (B + B.adjoint());
      Eigensystem es = hermitian_eigensystem(B, tol);
      basis.middleCols(g.begin, g.size()) = sub * es.eigenvectors;
      for (const IndexRange& sg : es.degeneracy_groups) {
        refined.push_back({g.begin + sg.begin, g.begin + sg.end});
      }
    }
    groups = std::move(refined);

    // A commuting member must now be diagonal in the accumulated basis; any
    // residual off-diagonal weight means the family does not commute.
    const ComplexMatrix conj = basis.adjoint() * A * basis;
    const double allowed = tol.offdiag * std::max(A.norm(), tol.abs_floor);
    const double off = max_offdiagonal(conj);
    if (off > allowed) {
      std::ostringstream os;
      os << "simultaneous_diagonalize: family member " << m
         << " is not diagonalized by the accumulated basis (off-diagonal " << off << ")";
      throw NotCommuting(os.str());
    }
  }

  for (Eigen::Index k = 0; k < n; ++k) canonicalize_phase(basis.col(k));
  return basis.adjoint();
}

double commutator_residual(const ComplexMatrix& A, const ComplexMatrix& B,
                           const Tolerances& tol) {
  require_square(A, "commutator_residual");
  require_square(B, "commutator_residual");
  if (A.rows() != B.rows()) {
    throw DimensionMismatch("commutator_residual: dimension mismatch");
  }
  const double scale = std::max(A.norm() * B.norm(), tol.abs_floor);
  return (A * B - B * A).norm() / scale;
}

ComplexMatrix psd_factor(const ComplexMatrix& W, int cols, const Tolerances& tol) {
  require_square(W, "psd_factor");
  if (cols < 1) throw DimensionMismatch("psd_factor: cols must be positive");

  const Eigensystem es = hermitian_eigensystem(W, tol);
  const int n = static_cast<int>(W.rows());
  const double rho = es.eigenvalues.cwiseAbs().maxCoeff();
  const double thr = tol.eig * std::max(rho, tol.abs_floor);

  if (es.eigenvalues[n - 1] < -thr) {
    std::ostringstream os;
    os << "psd_factor: eigenvalue " << es.eigenvalues[n - 1] << " below -" << thr;
    throw NotPsd(os.str());
  }
  int rank = 0;
  while (rank < n && es.eigenvalues[rank] > thr) ++rank;
  if (cols < rank) {
    std::ostringstream os;
    os << "psd_factor: rank " << rank << " exceeds requested cols " << cols;
    throw RankTooLarge(os.str());
  }

  ComplexMatrix B = ComplexMatrix::Zero(n, cols);
  for (int k = 0; k < rank; ++k) {
    B.col(k) = std::sqrt(std::max(es.eigenvalues[k], 0.0)) * es.eigenvectors.col(k);
  }
  return B;
}

}  // namespace msl
