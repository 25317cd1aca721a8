#include "msladder/angular.hpp"

#include <cmath>
#include <sstream>

namespace msl {

namespace {

constexpr int kMaxTwoJ = 40;  // j <= 20
constexpr int kMaxFact = 130;

long double factorial_ld(int n) {
  static const auto table = [] {
    std::array<long double, kMaxFact + 1> t{};
    t[0] = 1.0L;
    for (int i = 1; i <= kMaxFact; ++i) t[i] = t[i - 1] * static_cast<long double>(i);
    return t;
  }();
  return table[n];
}

void check_momentum(int two_j, int two_m, const char* name) {
  std::ostringstream os;
  if (two_j < 0) {
    os << "clebsch_gordan: negative " << name;
    throw InvalidQuantumNumbers(os.str());
  }
  if (two_j > kMaxTwoJ) {
    os << "clebsch_gordan: " << name << " exceeds supported range j <= " << kMaxTwoJ / 2;
    throw InvalidQuantumNumbers(os.str());
  }
  if (std::abs(two_m) > two_j) {
    os << "clebsch_gordan: |m| > j for " << name;
    throw InvalidQuantumNumbers(os.str());
  }
  if (((two_j + two_m) & 1) != 0) {
    os << "clebsch_gordan: j and m of " << name << " differ by a non-integer";
    throw InvalidQuantumNumbers(os.str());
  }
}

}  // namespace

double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2,
                      int two_j, int two_m) {
  check_momentum(two_j1, two_m1, "(j1, m1)");
  check_momentum(two_j2, two_m2, "(j2, m2)");
  check_momentum(two_j, two_m, "(j, m)");

  if (two_m1 + two_m2 != two_m) return 0.0;
  if (two_j < std::abs(two_j1 - two_j2) || two_j > two_j1 + two_j2) return 0.0;
  if (((two_j1 + two_j2 + two_j) & 1) != 0) return 0.0;

  // Integer factorial arguments of the Racah sum.
  const int j1pj2mj = (two_j1 + two_j2 - two_j) / 2;
  const int j1mj2pj = (two_j1 - two_j2 + two_j) / 2;
  const int mj1pj2pj = (-two_j1 + two_j2 + two_j) / 2;
  const int j1pj2pj1 = (two_j1 + two_j2 + two_j) / 2 + 1;
  const int j1pm1 = (two_j1 + two_m1) / 2;
  const int j1mm1 = (two_j1 - two_m1) / 2;
  const int j2pm2 = (two_j2 + two_m2) / 2;
  const int j2mm2 = (two_j2 - two_m2) / 2;
  const int jpm = (two_j + two_m) / 2;
  const int jmm = (two_j - two_m) / 2;
  const int jmj2pm1 = (two_j - two_j2 + two_m1) / 2;
  const int jmj1mm2 = (two_j - two_j1 - two_m2) / 2;

  const int kmin = std::max({0, -jmj2pm1, -jmj1mm2});
  const int kmax = std::min({j1pj2mj, j1mm1, j2pm2});
  if (kmin > kmax) return 0.0;

  long double sum = 0.0L;
  long double sign = (kmin % 2 == 0) ? 1.0L : -1.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double denom = factorial_ld(k) * factorial_ld(j1pj2mj - k) *
                              factorial_ld(j1mm1 - k) * factorial_ld(j2pm2 - k) *
                              factorial_ld(jmj2pm1 + k) * factorial_ld(jmj1mm2 + k);
    sum += sign / denom;
    sign = -sign;
  }

  long double pre = std::sqrt(static_cast<long double>(two_j + 1));
  pre *= std::sqrt(factorial_ld(j1pj2mj) * factorial_ld(j1mj2pj) *
                   factorial_ld(mj1pj2pj) / factorial_ld(j1pj2pj1));
  pre *= std::sqrt(factorial_ld(j1pm1) * factorial_ld(j1mm1));
  pre *= std::sqrt(factorial_ld(j2pm2) * factorial_ld(j2mm2));
  pre *= std::sqrt(factorial_ld(jpm) * factorial_ld(jmm));

  return static_cast<double>(pre * sum);
}

ComplexMatrix build_coupling(int two_j_lower, int two_j_upper,
                             const PolarizationTriple& pol) {
  if (two_j_lower < 0 || two_j_upper < 0) {
    throw InvalidQuantumNumbers("build_coupling: negative angular momentum");
  }
  if (std::abs(two_j_upper - two_j_lower) > 2) {
    std::ostringstream os;
    os << "build_coupling: |J_upper - J_lower| must be <= 1, got 2J = "
       << two_j_lower << " -> " << two_j_upper;
    throw InvalidTransition(os.str());
  }

  const int rows = two_j_lower + 1;
  const int cols = two_j_upper + 1;
  ComplexMatrix V = ComplexMatrix::Zero(rows, cols);
  const std::array<std::pair<int, Complex>, 3> components = {{
      {+2, pol.r}, {0, pol.p}, {-2, pol.l}}};  // two_q and amplitude

  for (int i = 0; i < rows; ++i) {
    const int two_m = -two_j_lower + 2 * i;
    for (const auto& [two_q, amp] : components) {
      const int two_mp = two_m + two_q;
      if (std::abs(two_mp) > two_j_upper) continue;
      const int j = (two_mp + two_j_upper) / 2;
      V(i, j) += amp * clebsch_gordan(two_j_lower, two_m, 2, two_q, two_j_upper, two_mp);
    }
  }
  return V;
}

PolarizationParameters polarization_parameters(const PolarizationTriple& pol) {
  PolarizationParameters out;
  const double r2 = std::norm(pol.r);
  const double l2 = std::norm(pol.l);
  out.eta = std::sqrt(l2 + r2);
  if (out.eta == 0.0) return out;
  out.epsilon = (l2 - r2) / (l2 + r2);
  out.xi = std::norm(pol.p) / (l2 + r2);
  out.alpha = std::arg(std::conj(pol.l) * std::conj(pol.r) * pol.p * pol.p);
  return out;
}

namespace {

// Evaluates the two lambdas of one transition from its closed form. `half`
// distinguishes the lower transition (trace term 2(1+xi), prefactor 1/sqrt 6)
// from the upper one (1+xi, 1/sqrt 3).
std::array<double, 2> transition_lambdas(const PolarizationTriple& pol, double f,
                                         bool lower) {
  const PolarizationParameters par = polarization_parameters(pol);
  const double pref = f / std::sqrt(lower ? 6.0 : 3.0);
  if (par.eta == 0.0) {
    const double lam = std::abs(pref) * std::abs(pol.p) * (lower ? std::sqrt(2.0) : 1.0);
    return {lam, lam};
  }

  const double trace_term = (lower ? 2.0 : 1.0) * (1.0 + par.xi);
  const double circ = std::max(0.0, 1.0 - par.epsilon * par.epsilon);
  double disc = par.epsilon * par.epsilon +
                2.0 * par.xi * (1.0 + std::sqrt(circ) * std::cos(par.alpha));
  disc = std::max(disc, 0.0);
  const double root = std::sqrt(disc);

  std::array<double, 2> out{};
  const double scale = std::max(1.0, trace_term);
  for (int branch = 0; branch < 2; ++branch) {
    double bracket = trace_term + (branch == 0 ? -root : root);
    if (bracket < 0.0) {
      if (bracket < -1e-12 * scale) {
        std::ostringstream os;
        os << "lambda closed form: negative bracket " << bracket;
        throw DomainError(os.str());
      }
      bracket = 0.0;
    }
    out[branch] = std::abs(pref) * par.eta * std::sqrt(bracket);
  }
  return out;
}

}  // namespace

LadderCouplings j3212_lambdas(const PolarizationTriple& pol1,
                              const PolarizationTriple& pol2,
                              double f1, double f2) {
  LadderCouplings out;
  out.lower = transition_lambdas(pol1, f1, true);
  out.upper = transition_lambdas(pol2, f2, false);
  return out;
}

std::pair<ComplexMatrix, ComplexMatrix> j3212_w_matrices(
    const PolarizationTriple& pol1, const PolarizationTriple& pol2,
    double f1, double f2) {
  const double r1 = std::norm(pol1.r), p1 = std::norm(pol1.p), l1 = std::norm(pol1.l);
  const double r2 = std::norm(pol2.r), p2 = std::norm(pol2.p), l2 = std::norm(pol2.l);
  const double s1 = f1 * f1 / 6.0;
  const double s2 = f2 * f2 / 3.0;

  ComplexMatrix W1(2, 2), W2(2, 2);
  const Complex off1 = -std::sqrt(2.0) * (std::conj(pol1.p) * pol1.r + pol1.p * std::conj(pol1.l));
  W1(0, 0) = s1 * (3.0 * r1 + 2.0 * p1 + l1);
  W1(0, 1) = s1 * off1;
  W1(1, 0) = s1 * std::conj(off1);
  W1(1, 1) = s1 * (r1 + 2.0 * p1 + 3.0 * l1);

  const Complex off2 = -std::sqrt(2.0) * (pol2.p * std::conj(pol2.l) + std::conj(pol2.p) * pol2.r);
  W2(0, 0) = s2 * (p2 + 2.0 * r2);
  W2(0, 1) = s2 * off2;
  W2(1, 0) = s2 * std::conj(off2);
  W2(1, 1) = s2 * (p2 + 2.0 * l2);
  return {W1, W2};
}

}  // namespace msl
