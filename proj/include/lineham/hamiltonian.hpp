#pragma once

#include "lineham/basis.hpp"
#include "lineham/circuit.hpp"
#include "lineham/legality.hpp"
#include "lineham/sparse.hpp"

namespace lineham {

namespace detail {

inline Matrix4 rule_gate(const CanonicalCircuit* c, int n, int site) {
  if (!c) return Matrix4::Identity();
  const int block = site / n;
  const int offset = site % n;  // 0-based gate slot within the round
  return c->rounds.at(block).at(offset).m;
}

struct DataImage {
  long data;
  cd coeff;
};

// Images of a source data index under one forward rule application at
// `site`. Bits are addressed by 2-dim-site rank; outside the affected pair
// every bit keeps its site.
inline void data_images(const Shape& src, const Shape& dst, Dataflow flow,
                        int site, const Matrix4& u, long d,
                        std::vector<DataImage>& out) {
  out.clear();
  const int qs = src.data_bits();
  const int qd = dst.data_bits();
  auto src_rank = [&](int p) {
    int r = 0;
    for (int i = 0; i < p; ++i)
      if (sym_data_dim(src.sym[i]) == 2) ++r;
    return r;
  };
  auto src_bit = [&](int p) {
    return static_cast<int>((d >> (qs - 1 - src_rank(p))) & 1);
  };
  if (flow == Dataflow::GateU) {
    const int a = src_bit(site), b = src_bit(site + 1);
    const int col = a * 2 + b;
    // ranks are unchanged: both sites are 2-dim before and after
    const int ra = src_rank(site);
    for (int row = 0; row < 4; ++row) {
      const cd v = u(row, col);
      if (v == cd(0, 0)) continue;
      long nd = d;
      nd &= ~(1L << (qd - 1 - ra));
      nd &= ~(1L << (qd - 1 - (ra + 1)));
      nd |= static_cast<long>((row >> 1) & 1) << (qd - 1 - ra);
      nd |= static_cast<long>(row & 1) << (qd - 1 - (ra + 1));
      out.push_back({nd, v});
    }
    return;
  }
  // Bijective flows and the qubit-creating 13-state rule: build the target
  // index site by site.
  long nd = 0;
  int rank = 0;
  for (int p = 0; p < dst.size(); ++p) {
    if (sym_data_dim(dst.sym[p]) != 2) continue;
    int bit;
    if (flow == Dataflow::CreateZero && p == site + 1) {
      bit = 0;
    } else if (flow == Dataflow::MoveLR && p == site + 1) {
      bit = src_bit(site);
    } else {
      bit = src_bit(p);
    }
    nd |= static_cast<long>(bit) << (qd - 1 - rank);
    ++rank;
  }
  out.push_back({nd, cd(1, 0)});
}

}  // namespace detail

// Propagation term: one projector-pair term per rule instance,
// 1/2 (|a><a| + |b><b| - T - T^dagger), with the gate rule carrying the
// location's two-qubit unitary. Restricting to a non-invariant shape set
// keeps the projector diagonals, matching P H P.
inline SparseOperator build_hprop(const SectorBasis& basis,
                                  const CanonicalCircuit* c = nullptr) {
  OperatorBuilder out(basis.dim);
  std::vector<detail::DataImage> images;
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const Shape& s = basis.shapes[si];
    const long q = basis.qbits[si];
    const long ds = 1L << q;
    for (const RuleInstance& m : forward_matches_fullscan(s)) {
      // alpha-side projector
      for (long d = 0; d < ds; ++d)
        out.add_diag(basis.global_index(si, d), 0.5);
      const Shape t = apply_rule(s, *m.rule, m.site, true);
      const int ti = basis.shape_index(t);
      if (ti < 0) continue;  // partner outside the restriction
      const Matrix4 u = m.rule->flow == Dataflow::GateU
                            ? detail::rule_gate(c, basis.n, m.site)
                            : Matrix4::Identity();
      for (long d = 0; d < ds; ++d) {
        detail::data_images(s, t, m.rule->flow, m.site, u, d, images);
        for (const auto& im : images)
          out.add_offdiag(basis.global_index(ti, im.data),
                          basis.global_index(si, d), -0.5 * im.coeff);
      }
    }
    for (const RuleInstance& m : backward_matches_fullscan(s)) {
      // beta-side projector; the 13-state creation rule only reaches the
      // branch with a fresh |0> on the created qubit.
      if (m.rule->flow == Dataflow::CreateZero) {
        const int rank = basis.bit_rank(si, m.site + 1);
        for (long d = 0; d < ds; ++d)
          if (SectorBasis::bit_of(d, q, rank) == 0)
            out.add_diag(basis.global_index(si, d), 0.5);
      } else {
        for (long d = 0; d < ds; ++d)
          out.add_diag(basis.global_index(si, d), 0.5);
      }
    }
  }
  return out.build();
}

// H0 of the interpolation: penalty 1 unless site 0 is the gate flag holding
// data 0.
inline SparseOperator build_h0_adiabatic(const SectorBasis& basis) {
  OperatorBuilder out(basis.dim);
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const Shape& s = basis.shapes[si];
    const long q = basis.qbits[si];
    const bool gate_at_0 = s.sym[0] == Sym::GateF;
    for (long d = 0; d < (1L << q); ++d) {
      const bool ground =
          gate_at_0 && SectorBasis::bit_of(d, q, basis.bit_rank(si, 0)) == 0;
      if (!ground) out.add_diag(basis.global_index(si, d), 1.0);
    }
  }
  return out.build();
}

// Input check: the gate flag passing over an ancilla's starting position in
// the first block must see |0>.
inline SparseOperator build_hinit(const SectorBasis& basis,
                                  const CanonicalCircuit& c) {
  c.validate();
  OperatorBuilder out(basis.dim);
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const Shape& s = basis.shapes[si];
    const long q = basis.qbits[si];
    for (int site = 0; site < c.n; ++site) {
      if (c.roles[site] != Role::Ancilla) continue;
      if (s.sym[site] != Sym::GateF) continue;
      const int rank = basis.bit_rank(si, site);
      for (long d = 0; d < (1L << q); ++d)
        if (SectorBasis::bit_of(d, q, rank) == 1)
          out.add_diag(basis.global_index(si, d), 1.0);
    }
  }
  return out.build();
}

// Output check: the gate flag on the output qubit's last-block position must
// not read |0>.
inline SparseOperator build_hfinal(const SectorBasis& basis,
                                   const CanonicalCircuit& c) {
  c.validate();
  const int site = (c.R() - 1) * c.n + (c.out_index - 1);
  OperatorBuilder out(basis.dim);
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const Shape& s = basis.shapes[si];
    if (s.sym[site] != Sym::GateF) continue;
    const long q = basis.qbits[si];
    const int rank = basis.bit_rank(si, site);
    for (long d = 0; d < (1L << q); ++d)
      if (SectorBasis::bit_of(d, q, rank) == 0)
        out.add_diag(basis.global_index(si, d), 1.0);
  }
  return out.build();
}

// Diagonal penalty: one unit per forbidden-arrangement hit of the shape.
inline SparseOperator build_hpenalty(const SectorBasis& basis) {
  OperatorBuilder out(basis.dim);
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const double hits = violation_count(basis.shapes[si]);
    if (hits == 0) continue;
    for (long d = 0; d < (1L << basis.qbits[si]); ++d)
      out.add_diag(basis.global_index(si, d), hits);
  }
  return out.build();
}

// 13-state non-degeneracy additions: gate at site 0 forces start at site 1;
// start propagates right through the first block, hands over to unborn at
// site n, and unborn propagates right from there on.
inline SparseOperator build_13state_terms(const SectorBasis& basis) {
  if (basis.alphabet != Alphabet::Thirteen)
    throw std::invalid_argument("13-state terms need the 13-state alphabet");
  OperatorBuilder out(basis.dim);
  const int n = basis.n;
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const Shape& s = basis.shapes[si];
    int hits = 0;
    if (s.sym[0] == Sym::GateF && s.sym[1] != Sym::Start) ++hits;
    for (int i = 1; i + 1 < n; ++i)
      if (s.sym[i] == Sym::Start && s.sym[i + 1] != Sym::Start) ++hits;
    if (s.sym[n - 1] == Sym::Start && s.sym[n] != Sym::Unborn) ++hits;
    for (int i = n; i + 1 < s.size(); ++i)
      if (s.sym[i] == Sym::Unborn && s.sym[i + 1] != Sym::Unborn) ++hits;
    if (hits == 0) continue;
    for (long d = 0; d < (1L << basis.qbits[si]); ++d)
      out.add_diag(basis.global_index(si, d), hits);
  }
  return out.build();
}

// H = Hprop + Hinit + Hfinal + Hpenalty.
inline SparseOperator full_h(const SectorBasis& basis,
                             const CanonicalCircuit& c) {
  return build_hprop(basis, &c)
      .plus(build_hinit(basis, c))
      .plus(build_hfinal(basis, c))
      .plus(build_hpenalty(basis));
}

// ---- legal sector and history states ------------------------------------

struct LegalSector {
  CanonicalCircuit circuit;
  Alphabet alphabet = Alphabet::Twelve;
  std::vector<Shape> steps;            // gamma(0..K) in trace order
  std::vector<RuleApplication> moves;  // moves[t] takes gamma(t) to gamma(t+1)
  SectorBasis basis;                   // the same shapes, sorted
  std::vector<int> step_to_shape;      // t -> index in basis.shapes

  long horizon() const { return static_cast<long>(steps.size()) - 1; }
};

inline LegalSector make_legal_sector(const CanonicalCircuit& c,
                                     Alphabet alphabet = Alphabet::Twelve) {
  c.validate();
  LegalSector ls;
  ls.circuit = c;
  ls.alphabet = alphabet;
  auto rows = trace_with_steps(initial_shape(c.n, c.R(), alphabet));
  ls.steps.reserve(rows.size());
  for (auto& [shape, app] : rows) ls.steps.push_back(shape);
  for (size_t t = 1; t < rows.size(); ++t) ls.moves.push_back(rows[t].second);
  if (static_cast<long>(ls.steps.size()) != c.K() + 1)
    throw std::logic_error("trace length disagrees with the step-count law");
  ls.basis = make_basis(ls.steps);
  for (const Shape& s : ls.steps)
    ls.step_to_shape.push_back(ls.basis.shape_index(s));
  return ls;
}

// Push an initial data vector through the trace: one amplitude vector per
// time step, each of dimension 2^(data bits of gamma(t)).
inline std::vector<Eigen::VectorXcd> replay_history_data(
    const LegalSector& ls, const Eigen::VectorXcd& initial) {
  const Shape& s0 = ls.steps.front();
  if (initial.size() != (1L << s0.data_bits()))
    throw std::invalid_argument("initial data dimension mismatch");
  std::vector<Eigen::VectorXcd> out;
  out.push_back(initial);
  std::vector<detail::DataImage> images;
  for (size_t t = 0; t < ls.moves.size(); ++t) {
    const Shape& src = ls.steps[t];
    const Shape& dst = ls.steps[t + 1];
    const RuleApplication& app = ls.moves[t];
    const Matrix4 u = app.flow == Dataflow::GateU
                          ? detail::rule_gate(&ls.circuit, ls.basis.n, app.site)
                          : Matrix4::Identity();
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(1L << dst.data_bits());
    for (long d = 0; d < out.back().size(); ++d) {
      const cd a = out.back()[d];
      if (a == cd(0, 0)) continue;
      detail::data_images(src, dst, app.flow, app.site, u, d, images);
      for (const auto& im : images) next[im.data] += a * im.coeff;
    }
    out.push_back(std::move(next));
  }
  return out;
}

// History state (1/sqrt(K+1)) sum_t |gamma(t)> |data(t)> in basis
// coordinates, for a given input data vector at t = 0.
inline Eigen::VectorXcd history_state(const LegalSector& ls,
                                      const Eigen::VectorXcd& initial) {
  auto data = replay_history_data(ls, initial);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(ls.basis.dim);
  const double w = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (size_t t = 0; t < data.size(); ++t) {
    const int si = ls.step_to_shape[t];
    for (long d = 0; d < data[t].size(); ++d)
      psi[ls.basis.global_index(si, d)] += w * data[t][d];
  }
  return psi;
}

// Orthonormal basis of the history-state space, one column per input basis
// vector.
inline Eigen::MatrixXcd history_basis(const LegalSector& ls) {
  const long d0 = 1L << ls.steps.front().data_bits();
  Eigen::MatrixXcd cols(ls.basis.dim, d0);
  for (long z = 0; z < d0; ++z) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d0);
    e[z] = 1;
    cols.col(z) = history_state(ls, e);
  }
  return cols;
}

// The interpolation pair restricted to the span of the trace for one input
// basis vector z: h1 is exactly the +-1/2 tridiagonal, h0 is diagonal with a
// single zero at t = 0 when the first qubit of z is 0.
struct RestrictedInterpolation {
  Eigen::MatrixXcd h0;
  Eigen::MatrixXcd h1;
  Eigen::MatrixXcd columns;  // basis.dim x (K+1) frame
};

inline RestrictedInterpolation restrict_interpolation(const LegalSector& ls,
                                                      long z) {
  const long steps = static_cast<long>(ls.steps.size());
  const long d0 = 1L << ls.steps.front().data_bits();
  if (z < 0 || z >= d0) throw std::invalid_argument("input index out of range");
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d0);
  e[z] = 1;
  auto data = replay_history_data(ls, e);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(ls.basis.dim, steps);
  for (long t = 0; t < steps; ++t) {
    const int si = ls.step_to_shape[t];
    for (long d = 0; d < data[t].size(); ++d)
      cols(ls.basis.global_index(si, d), t) = data[t][d];
  }
  RestrictedInterpolation out;
  out.columns = cols;
  const SparseOperator hprop = build_hprop(ls.basis, &ls.circuit);
  const SparseOperator h0 = build_h0_adiabatic(ls.basis);
  Eigen::MatrixXcd hp(ls.basis.dim, steps), h0c(ls.basis.dim, steps);
  for (long t = 0; t < steps; ++t) {
    hp.col(t) = hprop.apply(cols.col(t));
    h0c.col(t) = h0.apply(cols.col(t));
  }
  out.h1 = cols.adjoint() * hp;
  out.h0 = cols.adjoint() * h0c;
  return out;
}

// (K+1)x(K+1) representation of Hprop on the trace span, one matrix per
// input assignment. Each equals the reference path matrix exactly.
inline std::vector<Eigen::MatrixXcd> restrict_to_history_basis(
    const LegalSector& ls) {
  const long d0 = 1L << ls.steps.front().data_bits();
  std::vector<Eigen::MatrixXcd> out;
  for (long z = 0; z < d0; ++z)
    out.push_back(restrict_interpolation(ls, z).h1);
  return out;
}

}  // namespace lineham
