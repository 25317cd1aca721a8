#include "msladder/frobenius.hpp"

#include <cmath>
#include <sstream>

namespace msl {

ComplexMatrix commuting_matrix_from_polynomial(const ComplexMatrix& W1,
                                               const std::vector<double>& coeffs,
                                               const Tolerances& tol) {
  if (W1.rows() != W1.cols() || W1.rows() < 1) {
    throw DimensionMismatch("commuting_matrix_from_polynomial: base must be square");
  }
  if (hermiticity_residual(W1) > tol.herm) {
    throw NotHermitian("commuting_matrix_from_polynomial: base is not Hermitian");
  }
  if (coeffs.size() != static_cast<std::size_t>(W1.rows())) {
    std::ostringstream os;
    os << "commuting_matrix_from_polynomial: expected " << W1.rows()
       << " coefficients, got " << coeffs.size();
    throw DimensionMismatch(os.str());
  }

  const Eigen::Index n = W1.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix X = coeffs.back() * id;
  for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
    X = W1 * X + coeffs[k] * id;
  }
  return 0.5 * (X + X.adjoint());
}

ComplexMatrix commuting_matrix_from_spectrum(const ComplexMatrix& G,
                                             const std::vector<double>& xi,
                                             const Tolerances& tol) {
  if (G.rows() != G.cols() || G.rows() < 1) {
    throw DimensionMismatch("commuting_matrix_from_spectrum: G must be square");
  }
  if (unitarity_residual(G) > tol.unitary) {
    throw NotUnitary("commuting_matrix_from_spectrum: G is not unitary");
  }
  if (xi.size() != static_cast<std::size_t>(G.rows())) {
    throw DimensionMismatch("commuting_matrix_from_spectrum: xi length mismatch");
  }
  ComplexVector d(G.rows());
  for (Eigen::Index k = 0; k < G.rows(); ++k) d[k] = xi[k];
  const ComplexMatrix X = G.adjoint() * d.asDiagonal() * G;
  return 0.5 * (X + X.adjoint());
}

ComplexMatrix realize(const CommutingFamilySpec& spec, const Tolerances& tol) {
  const bool has_coeffs = spec.coefficients.has_value();
  const bool has_diag = spec.diagonal_values.has_value();
  if (has_coeffs == has_diag) {
    throw DimensionMismatch(
        "realize: exactly one of coefficients/diagonal_values must be supplied");
  }
  if (has_coeffs) {
    return commuting_matrix_from_polynomial(spec.base, *spec.coefficients, tol);
  }
  const Eigensystem es = hermitian_eigensystem(spec.base, tol);
  return commuting_matrix_from_spectrum(es.eigenvectors.adjoint(), *spec.diagonal_values, tol);
}

ComplexMatrix compatible_upper_coupling(const ComplexMatrix& V1,
                                        const std::vector<double>& coeffs,
                                        int upper_dim, const Tolerances& tol) {
  const ComplexMatrix W1 = V1.adjoint() * V1;
  const ComplexMatrix W2 = commuting_matrix_from_polynomial(W1, coeffs, tol);
  return psd_factor(W2, upper_dim, tol);
}

ConditionVerdict check_example_conditions(const PolarizationTriple& pol1,
                                          const PolarizationTriple& pol2,
                                          double threshold) {
  // z1 = l1* p1 + r1 p1*,  z2 = l2 p2* + p2 r2*
  const Complex z1 = std::conj(pol1.l) * pol1.p + pol1.r * std::conj(pol1.p);
  const Complex z2 = pol2.l * std::conj(pol2.p) + pol2.p * std::conj(pol2.r);
  const double d1 = std::norm(pol1.r) - std::norm(pol1.l);
  const double d2 = std::norm(pol2.r) - std::norm(pol2.l);

  const double scale1 = std::norm(pol1.r) + std::norm(pol1.p) + std::norm(pol1.l);
  const double scale2 = std::norm(pol2.r) + std::norm(pol2.p) + std::norm(pol2.l);
  const double scale = std::max(scale1 * scale2, 1e-300);

  ConditionVerdict verdict;
  verdict.cond1_residual = std::abs(std::imag(z1 * z2)) / scale;
  verdict.cond2_residual = std::abs(std::conj(z1) * d2 - d1 * z2) / scale;
  verdict.satisfied = std::max(verdict.cond1_residual, verdict.cond2_residual) < threshold;

  const double imbalance = std::norm(pol1.l) - std::norm(pol1.r);
  if (std::abs(imbalance) > 1e-12 * std::max(scale1, 1e-300)) {
    verdict.forced_p2 = (pol2.l * z1 - pol2.r * std::conj(z1)) / imbalance;
  }
  return verdict;
}

}  // namespace msl
