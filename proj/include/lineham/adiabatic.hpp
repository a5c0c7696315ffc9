#pragma once

#include <map>

#include "lineham/hamiltonian.hpp"
#include "lineham/spectral.hpp"

namespace lineham {

// Interpolation schedule s(t) over t in [0, T]. Empty grid means the linear
// ramp s = t/T; a nonempty grid is sampled at equally spaced times and
// interpolated linearly.
struct Schedule {
  double T = 0;
  long steps = 0;  // 0: pick automatically
  std::vector<double> s_grid;

  double s_at(double t) const {
    if (T <= 0) return 1.0;
    const double x = std::clamp(t / T, 0.0, 1.0);
    if (s_grid.empty()) return x;
    const double pos = x * (s_grid.size() - 1);
    const long i = std::min<long>(static_cast<long>(pos), s_grid.size() - 2);
    const double f = pos - i;
    return s_grid[i] * (1 - f) + s_grid[i + 1] * f;
  }
  void validate() const {
    if (T < 0) throw std::invalid_argument("negative schedule duration");
    if (!s_grid.empty()) {
      if (s_grid.size() < 2 || s_grid.front() != 0.0 || s_grid.back() != 1.0)
        throw std::invalid_argument("schedule grid must run from 0 to 1");
      for (size_t i = 1; i < s_grid.size(); ++i)
        if (s_grid[i] < s_grid[i - 1])
          throw std::invalid_argument("schedule grid must be monotone");
    }
  }
};

enum class Integrator { Auto, RK4, Magnus2 };

struct EvolveResult {
  Eigen::VectorXcd state;
  double norm_drift = 0;
  long steps = 0;
  Integrator used = Integrator::RK4;
};

// Integrate i dpsi/dt = [(1-s(t)) H0 + s(t) H1] psi from t = 0 to T.
//
// RK4 keeps |H| dt <= 0.05 and tightens the step further so the total norm
// drift stays within 1e-8; for long runs that step count is prohibitive, so
// a midpoint-exponential step (unitary to series precision) takes over.
inline EvolveResult evolve_interpolation(const SparseOperator& h0,
                                         const SparseOperator& h1,
                                         const Schedule& sched,
                                         Eigen::VectorXcd psi,
                                         Integrator method = Integrator::Auto) {
  sched.validate();
  if (h0.dim() != h1.dim() || psi.size() != h0.dim())
    throw std::invalid_argument("dimension mismatch in evolution");
  const double hnorm = std::max({1e-12, h0.one_norm(), h1.one_norm()});
  EvolveResult out;
  if (sched.T == 0) {
    out.state = std::move(psi);
    return out;
  }
  long steps_rk4;
  {
    const double drift_x =
        std::pow(1.2e-6 / std::max(sched.T * hnorm, 1e-12), 0.25);
    const double x = std::min(0.05, drift_x);
    steps_rk4 = std::max<long>(1, static_cast<long>(std::ceil(sched.T * hnorm / x)));
  }
  Integrator use = method;
  if (use == Integrator::Auto)
    use = steps_rk4 <= 200000 ? Integrator::RK4 : Integrator::Magnus2;

  const long dim = h0.dim();
  Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), stage(dim);
  auto rhs = [&](double s, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    h0.matvec(x.data(), y.data());
    h1.matvec(x.data(), tmp.data());
    y = cd(0, -1) * ((1.0 - s) * y + s * tmp);
  };

  if (use == Integrator::RK4) {
    const long n = sched.steps > 0 ? sched.steps : steps_rk4;
    const double dt = sched.T / n;
    for (long i = 0; i < n; ++i) {
      const double t = i * dt;
      rhs(sched.s_at(t), psi, k1);
      stage = psi + 0.5 * dt * k1;
      rhs(sched.s_at(t + 0.5 * dt), stage, k2);
      stage = psi + 0.5 * dt * k2;
      rhs(sched.s_at(t + 0.5 * dt), stage, k3);
      stage = psi + dt * k3;
      rhs(sched.s_at(t + dt), stage, k4);
      psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.steps = n;
  } else {
    // midpoint-exponential steps with |H| h <= 0.2
    const long n = sched.steps > 0
                       ? sched.steps
                       : std::max<long>(1, static_cast<long>(
                                               std::ceil(sched.T * hnorm / 0.2)));
    const double dt = sched.T / n;
    Eigen::VectorXcd term(dim), acc(dim);
    for (long i = 0; i < n; ++i) {
      const double s = sched.s_at((i + 0.5) * dt);
      acc = psi;
      term = psi;
      for (int k = 1; k <= 48; ++k) {
        h0.matvec(term.data(), k1.data());
        h1.matvec(term.data(), tmp.data());
        term = (cd(0, -dt) / static_cast<double>(k)) *
               ((1.0 - s) * k1 + s * tmp);
        acc += term;
        if (term.norm() <= 1e-17 * acc.norm()) break;
        if (k == 48)
          throw std::runtime_error("exponential series failed to converge");
      }
      psi = acc;
    }
    out.steps = n;
  }
  out.used = use;
  out.norm_drift = std::abs(psi.norm() - 1.0);
  if (out.norm_drift > 1e-8)
    throw std::runtime_error("evolution norm drift " +
                             std::to_string(out.norm_drift) +
                             " exceeds 1e-8 after " +
                             std::to_string(out.steps) + " steps");
  out.state = std::move(psi);
  return out;
}

struct AdiabaticRun {
  double T = 0;
  double fidelity = 0;       // squared overlap with the final ground space
  double norm_drift = 0;
  long steps = 0;
  Eigen::VectorXcd state;    // legal-sector coordinates
};

// Evolve in the legal sector from |gamma(0)>|input>, interpolating from the
// start-projector term to the propagation term. The legal subspace is
// invariant under every H(s), so the restricted generator is exact.
inline AdiabaticRun evolve(const LegalSector& ls, const Schedule& sched,
                           const Eigen::VectorXcd* initial = nullptr,
                           Integrator method = Integrator::Auto) {
  const SparseOperator h0 = build_h0_adiabatic(ls.basis);
  const SparseOperator h1 = build_hprop(ls.basis, &ls.circuit);
  Eigen::VectorXcd psi;
  if (initial) {
    psi = *initial;
    if (psi.size() != ls.basis.dim)
      throw std::invalid_argument("initial state dimension mismatch");
  } else {
    psi = Eigen::VectorXcd::Zero(ls.basis.dim);
    psi[ls.basis.global_index(ls.step_to_shape[0], 0)] = 1.0;
  }
  EvolveResult ev = evolve_interpolation(h0, h1, sched, std::move(psi), method);
  AdiabaticRun run;
  run.T = sched.T;
  run.norm_drift = ev.norm_drift;
  run.steps = ev.steps;
  const Eigen::MatrixXcd ground = history_basis(ls);
  run.fidelity = (ground.adjoint() * ev.state).squaredNorm();
  run.state = std::move(ev.state);
  return run;
}

struct GapScan {
  double g_min = 0;
  double s_star = 0;
  double g_min_refined = 0;
  double s_star_refined = 0;
  std::vector<std::pair<double, double>> samples;  // (s, gap)
};

// Instantaneous gap of the interpolation restricted to the trace span for
// one input assignment, over an s-grid, with one refinement pass around the
// minimum.
inline GapScan min_gap_scan(const LegalSector& ls, int grid_points = 101,
                            long z = 0) {
  if (grid_points < 2) throw std::invalid_argument("need at least two grid points");
  const RestrictedInterpolation ri = restrict_interpolation(ls, z);
  auto gap_at = [&](double s) {
    const Eigen::MatrixXcd h = (1.0 - s) * ri.h0 + s * ri.h1;
    return spectral_gap(h).second;
  };
  GapScan out;
  out.g_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double s = static_cast<double>(i) / (grid_points - 1);
    const double g = gap_at(s);
    out.samples.emplace_back(s, g);
    if (g < out.g_min) {
      out.g_min = g;
      out.s_star = s;
    }
  }
  const double cell = 1.0 / (grid_points - 1);
  const double lo = std::max(0.0, out.s_star - cell);
  const double hi = std::min(1.0, out.s_star + cell);
  out.g_min_refined = out.g_min;
  out.s_star_refined = out.s_star;
  for (int i = 0; i < grid_points; ++i) {
    const double s = lo + (hi - lo) * i / (grid_points - 1);
    const double g = gap_at(s);
    if (g < out.g_min_refined) {
      out.g_min_refined = g;
      out.s_star_refined = s;
    }
  }
  return out;
}

struct Decoded {
  double t_k_weight = 0;            // mass on the final configuration
  double history_fidelity = 0;      // squared overlap with the history space
  std::map<std::string, double> distribution;  // conditional last-block readout
};

// Project onto the t = K configuration, renormalize, and read the last-block
// qubits. On the exact history state the projection weight is 1/(K+1).
inline Decoded decode_output(const LegalSector& ls,
                             const Eigen::VectorXcd& psi) {
  if (psi.size() != ls.basis.dim)
    throw std::invalid_argument("state dimension mismatch");
  Decoded out;
  const int si = ls.step_to_shape.back();
  const int q = ls.basis.qbits[si];
  std::vector<double> mass(1L << q, 0.0);
  for (long d = 0; d < (1L << q); ++d)
    mass[d] = std::norm(psi[ls.basis.global_index(si, d)]);
  for (double m : mass) out.t_k_weight += m;
  if (out.t_k_weight < 1e-6)
    throw std::runtime_error("final-configuration weight below 1e-6; decoding unreliable");
  for (long d = 0; d < (1L << q); ++d) {
    if (mass[d] == 0) continue;
    std::string bits(q, '0');
    for (int j = 0; j < q; ++j)
      bits[j] = SectorBasis::bit_of(d, q, j) ? '1' : '0';
    out.distribution[bits] = mass[d] / out.t_k_weight;
  }
  out.history_fidelity = (history_basis(ls).adjoint() * psi).squaredNorm();
  return out;
}

struct SweepPoint {
  double T;
  double fidelity;
};

// Double T until the target fidelity is reached (or the cap runs out).
inline std::vector<SweepPoint> fidelity_sweep(const LegalSector& ls,
                                              double target = 0.99,
                                              double t0 = 1.0,
                                              int max_doublings = 24) {
  std::vector<SweepPoint> out;
  double T = t0;
  for (int i = 0; i <= max_doublings; ++i, T *= 2) {
    Schedule sched;
    sched.T = T;
    AdiabaticRun run = evolve(ls, sched);
    out.push_back({T, run.fidelity});
    if (run.fidelity >= target) break;
  }
  return out;
}

}  // namespace lineham
