#include "msladder/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msl {

namespace {

using Rhs = std::function<void(double, const ComplexVector&, ComplexVector&)>;

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Dopri5Workspace {
  ComplexVector k1, k2, k3, k4, k5, k6, k7, tmp;
  void resize(Eigen::Index n) {
    for (ComplexVector* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &tmp}) v->resize(n);
  }
};

// One trial step; returns the scaled error norm (accept when <= 1).
double dopri5_step(const Rhs& rhs, double t, const ComplexVector& y, double h,
                   ComplexVector& y_out, double atol, double rtol,
                   Dopri5Workspace& w) {
  rhs(t, y, w.k1);
  w.tmp = y + h * (a21 * w.k1);
  rhs(t + c2 * h, w.tmp, w.k2);
  w.tmp = y + h * (a31 * w.k1 + a32 * w.k2);
  rhs(t + c3 * h, w.tmp, w.k3);
  w.tmp = y + h * (a41 * w.k1 + a42 * w.k2 + a43 * w.k3);
  rhs(t + c4 * h, w.tmp, w.k4);
  w.tmp = y + h * (a51 * w.k1 + a52 * w.k2 + a53 * w.k3 + a54 * w.k4);
  rhs(t + c5 * h, w.tmp, w.k5);
  w.tmp = y + h * (a61 * w.k1 + a62 * w.k2 + a63 * w.k3 + a64 * w.k4 + a65 * w.k5);
  rhs(t + h, w.tmp, w.k6);
  y_out = y + h * (b1 * w.k1 + b3 * w.k3 + b4 * w.k4 + b5 * w.k5 + b6 * w.k6);
  rhs(t + h, y_out, w.k7);

  double err = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const Complex e = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] +
                           e6 * w.k6[i] + e7 * w.k7[i]);
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y_out[i]));
    const double q = std::abs(e) / sc;
    err += q * q;
  }
  return std::sqrt(err / static_cast<double>(y.size()));
}

void rk4_step(const Rhs& rhs, double t, ComplexVector& y, double h,
              Dopri5Workspace& w) {
  rhs(t, y, w.k1);
  w.tmp = y + (0.5 * h) * w.k1;
  rhs(t + 0.5 * h, w.tmp, w.k2);
  w.tmp = y + (0.5 * h) * w.k2;
  rhs(t + 0.5 * h, w.tmp, w.k3);
  w.tmp = y + h * w.k3;
  rhs(t + h, w.tmp, w.k4);
  y += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

RealVector sample_grid(const PropagatorConfig& config) {
  if (config.sample_count < 2) throw DimensionMismatch("sample_count must be >= 2");
  if (!(config.t_end > config.t_start)) {
    throw DimensionMismatch("t_end must exceed t_start");
  }
  RealVector times(config.sample_count);
  const double span = config.t_end - config.t_start;
  for (int i = 0; i < config.sample_count; ++i) {
    times[i] = config.t_start + span * i / (config.sample_count - 1);
  }
  times[config.sample_count - 1] = config.t_end;
  return times;
}

Trajectory integrate_rhs(const Rhs& rhs, const ComplexVector& initial,
                         const PropagatorConfig& config) {
  Trajectory traj;
  traj.times = sample_grid(config);
  traj.amplitudes.resize(initial.size(), config.sample_count);
  traj.amplitudes.col(0) = initial;

  Dopri5Workspace w;
  w.resize(initial.size());
  ComplexVector y = initial;
  ComplexVector y_trial(initial.size());
  double t = config.t_start;

  if (config.method == IntegrationMethod::rk4_fixed) {
    if (!(config.step > 0.0)) throw DimensionMismatch("rk4_fixed requires step > 0");
    for (int s = 1; s < config.sample_count; ++s) {
      const double target = traj.times[s];
      const int n_sub = std::max(1, static_cast<int>(std::ceil((target - t) / config.step)));
      const double h = (target - t) / n_sub;
      for (int i = 0; i < n_sub; ++i) {
        rk4_step(rhs, t, y, h, w);
        t += h;
      }
      t = target;
      traj.amplitudes.col(s) = y;
    }
    return traj;
  }

  const double span = config.t_end - config.t_start;
  double h = span / 100.0;
  for (int s = 1; s < config.sample_count; ++s) {
    const double target = traj.times[s];
    while (t < target) {
      const bool clipped = h > target - t;
      const double h_try = clipped ? target - t : h;
      const double err = dopri5_step(rhs, t, y, h_try, y_trial, config.atol,
                                     config.rtol, w);
      if (std::isfinite(err) && err <= 1.0) {
        t += h_try;
        y.swap(y_trial);
        const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        if (!clipped) h = h_try * grow;
        // else keep the natural step for the next interval
      } else {
        const double shrink =
            std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
        h = h_try * shrink;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
          std::ostringstream os;
          os << "adaptive step size underflow at t = " << t;
          throw StepFailure(os.str());
        }
      }
    }
    traj.amplitudes.col(s) = y;
  }
  return traj;
}

}  // namespace

Trajectory integrate_schrodinger(const HamiltonianFn& hamiltonian,
                                 const ComplexVector& initial,
                                 const PropagatorConfig& config) {
  const Complex minus_i(0.0, -1.0);
  Rhs rhs = [&](double t, const ComplexVector& y, ComplexVector& dydt) {
    dydt = minus_i * (hamiltonian(t) * y);
  };
  return integrate_rhs(rhs, initial, config);
}

Trajectory propagate(const LadderSystem& system, const ComplexVector& initial,
                     const PropagatorConfig& config) {
  const ValidationReport vr = validate(system);
  if (!vr.ok()) throw InvalidSystem("propagate: " + vr.summary());
  if (initial.size() != system.total_dimension()) {
    throw DimensionMismatch("propagate: initial state dimension mismatch");
  }
  Trajectory traj = integrate_schrodinger(
      [&](double t) { return detail::assemble_unchecked(system, t); }, initial, config);
  traj.basis = BasisTag::original;
  return traj;
}

Trajectory propagate_decomposed(const DecompositionReport& report,
                                const LadderSystem& system,
                                const ComplexVector& initial,
                                const PropagatorConfig& config) {
  const ValidationReport vr = validate(system);
  if (!vr.ok()) throw InvalidSystem("propagate_decomposed: " + vr.summary());
  const int dim = system.total_dimension();
  if (report.total_dimension() != dim) {
    throw DimensionMismatch("propagate_decomposed: report does not match system");
  }
  if (initial.size() != dim) {
    throw DimensionMismatch("propagate_decomposed: initial state dimension mismatch");
  }

  const ComplexMatrix S = report.full_transformation();
  const ComplexVector y0 = S * initial;

  Trajectory traj;
  traj.basis = BasisTag::ms;
  traj.times = sample_grid(config);
  traj.amplitudes.resize(dim, config.sample_count);

  for (const Chain& chain : report.chains) {
    std::vector<int> global(chain.length());
    for (int i = 0; i < chain.length(); ++i) {
      global[i] = system.level_offset(chain.members[i].first) + chain.members[i].second;
    }

    if (chain.length() == 1) {
      // Dark state: only a detuning phase.
      const Complex amp0 = y0[global[0]];
      const double delta = chain.detunings[0];
      for (int s = 0; s < config.sample_count; ++s) {
        const double dt = traj.times[s] - config.t_start;
        traj.amplitudes(global[0], s) = amp0 * std::exp(Complex(0.0, -delta * dt));
      }
      continue;
    }

    ComplexVector sub0(chain.length());
    for (int i = 0; i < chain.length(); ++i) sub0[i] = y0[global[i]];
    const Trajectory sub = integrate_schrodinger(
        [&](double t) { return chain_hamiltonian(chain, system, t); }, sub0, config);
    for (int i = 0; i < chain.length(); ++i) {
      traj.amplitudes.row(global[i]) = sub.amplitudes.row(i);
    }
  }
  return traj;
}

BasisComparison compare_bases(const Trajectory& original, const Trajectory& ms,
                              const MsTransformation& transformation) {
  if (original.times.size() != ms.times.size()) {
    throw GridMismatch("compare_bases: sample counts differ");
  }
  const double span = std::max(
      1.0, std::abs(original.times[original.times.size() - 1] - original.times[0]));
  for (Eigen::Index s = 0; s < original.times.size(); ++s) {
    if (std::abs(original.times[s] - ms.times[s]) > 1e-12 * span) {
      throw GridMismatch("compare_bases: time grids differ");
    }
  }
  if (original.amplitudes.rows() != ms.amplitudes.rows()) {
    throw GridMismatch("compare_bases: state dimensions differ");
  }

  ComplexMatrix S = ComplexMatrix::Zero(original.amplitudes.rows(), original.amplitudes.rows());
  int off = 0;
  for (const auto& block : transformation.blocks) {
    S.block(off, off, block.rows(), block.cols()) = block;
    off += static_cast<int>(block.rows());
  }
  if (off != original.amplitudes.rows()) {
    throw GridMismatch("compare_bases: transformation dimension differs");
  }

  BasisComparison out;
  out.per_state_population_deviation = RealVector::Zero(original.amplitudes.rows());
  for (Eigen::Index s = 0; s < original.times.size(); ++s) {
    const ComplexVector mapped = S * original.amplitudes.col(s);
    out.max_state_deviation =
        std::max(out.max_state_deviation, (mapped - ms.amplitudes.col(s)).norm());
    for (Eigen::Index i = 0; i < mapped.size(); ++i) {
      const double dev =
          std::abs(std::norm(mapped[i]) - std::norm(ms.amplitudes(i, s)));
      out.per_state_population_deviation[i] =
          std::max(out.per_state_population_deviation[i], dev);
    }
  }
  out.max_population_deviation = out.per_state_population_deviation.maxCoeff();
  return out;
}

double norm_drift(const Trajectory& trajectory) {
  const double n0 = trajectory.amplitudes.col(0).norm();
  const double scale = std::max(n0, 1e-300);
  double drift = 0.0;
  for (Eigen::Index s = 0; s < trajectory.times.size(); ++s) {
    drift = std::max(drift, std::abs(trajectory.amplitudes.col(s).norm() - n0) / scale);
  }
  return drift;
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "t";
  for (Eigen::Index i = 0; i < trajectory.amplitudes.rows(); ++i) {
    out << ", re_c" << (i + 1) << ", im_c" << (i + 1);
  }
  out << "\n";
  char buf[32];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index s = 0; s < trajectory.times.size(); ++s) {
    emit(trajectory.times[s]);
    for (Eigen::Index i = 0; i < trajectory.amplitudes.rows(); ++i) {
      out << ", ";
      emit(trajectory.amplitudes(i, s).real());
      out << ", ";
      emit(trajectory.amplitudes(i, s).imag());
    }
    out << "\n";
  }
}

}  // namespace msl
