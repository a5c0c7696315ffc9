#pragma once

#include <deque>

#include "lineham/hamiltonian.hpp"
#include "lineham/spectral.hpp"

namespace lineham {

// A minimal shape set closed under the transition rules. Shapes without a
// unique active site never move and sit in singleton orbits.
struct Orbit {
  int id = 0;
  std::vector<Shape> members;  // sorted in render order
  int type = 0;                // 1 legal, 2 detectable, 3 has undetectable member
  int qbits = 0;
  bool cycle = false;
  long detectable = 0;         // members with at least one group 1-7 hit
  double detectable_fraction = 0;

  long size() const { return static_cast<long>(members.size()); }
};

namespace detail {

inline int orbit_type(const std::vector<Shape>& members) {
  long legal = 0;
  bool any_exception = false;
  for (const Shape& s : members) {
    const ShapeClass c = classify_shape(s);
    legal += c == ShapeClass::Legal;
    any_exception |= c == ShapeClass::ExceptionI || c == ShapeClass::ExceptionII ||
                     c == ShapeClass::ExceptionIII;
  }
  // mixed legal/illegal orbits would contradict closure of the legal set
  if (legal != 0 && legal != static_cast<long>(members.size()))
    throw std::logic_error("orbit mixes legal and illegal members");
  if (legal > 0) return 1;
  return any_exception ? 3 : 2;
}

}  // namespace detail

// Partition the shape space into orbits: connected components of the
// forward/backward transition graph over single-active shapes, plus
// singletons for everything the rules cannot move.
inline std::vector<Orbit> decompose(int n, int R, Alphabet al,
                                    EnumerationScope scope) {
  const int L = n * R;
  std::unordered_map<uint64_t, int> seen;  // shape code -> orbit index
  std::vector<std::vector<Shape>> groups;

  for_each_shape(n, R, al, scope, [&](const Shape& start) {
    const uint64_t code = shape_code(start);
    if (seen.count(code)) return;
    if (start.active_count() != 1) {
      seen.emplace(code, static_cast<int>(groups.size()));
      groups.push_back({start});
      return;
    }
    // BFS closure under forward and backward steps.
    std::vector<Shape> members;
    std::deque<Shape> frontier{start};
    seen.emplace(code, static_cast<int>(groups.size()));
    while (!frontier.empty()) {
      Shape s = std::move(frontier.front());
      frontier.pop_front();
      auto push = [&](const Shape& t) {
        const uint64_t tc = shape_code(t);
        if (seen.emplace(tc, static_cast<int>(groups.size())).second)
          frontier.push_back(t);
      };
      if (auto fwd = forward(s)) push(fwd->first);
      if (auto bwd = backward(s)) push(bwd->first);
      members.push_back(std::move(s));
    }
    groups.push_back(std::move(members));
  });

  std::vector<Orbit> orbits(groups.size());
  for (size_t g = 0; g < groups.size(); ++g) {
    Orbit& o = orbits[g];
    o.members = std::move(groups[g]);
    std::sort(o.members.begin(), o.members.end());
    o.qbits = o.members.front().data_bits();
    if (al != Alphabet::Nine) {
      o.type = detail::orbit_type(o.members);
      for (const Shape& s : o.members)
        o.detectable += find_violations(s).empty() ? 0 : 1;
      o.detectable_fraction =
          static_cast<double>(o.detectable) / o.members.size();
    }
    // A component is a cycle when every member has both neighbors.
    o.cycle = o.members.size() > 1;
    for (const Shape& s : o.members) {
      if (s.active_count() != 1 || !forward(s) || !backward(s)) {
        o.cycle = false;
        break;
      }
    }
  }
  std::sort(orbits.begin(), orbits.end(), [](const Orbit& a, const Orbit& b) {
    return a.members.front() < b.members.front();
  });
  for (size_t i = 0; i < orbits.size(); ++i)
    orbits[i].id = static_cast<int>(i);
  return orbits;
}

inline SectorBasis orbit_basis(const Orbit& o) { return make_basis(o.members); }

// P_S (Hprop + Hpenalty) P_S on the orbit's span. Above the dense threshold
// callers should go through the iterative eigensolver instead of to_dense.
inline constexpr long kDenseSectorThreshold = 4096;

inline SparseOperator sector_operator(const Orbit& o,
                                      const CanonicalCircuit* c = nullptr) {
  const SectorBasis basis = orbit_basis(o);
  return build_hprop(basis, c).plus(build_hpenalty(basis));
}

// Shape-level counterpart: data blocks collapsed to their norms. Its ground
// energy never exceeds the sector operator's (the off-diagonal blocks are
// unitary of norm 1/2), so it serves as a cheap certified floor.
inline Eigen::MatrixXd shape_level_operator(const Orbit& o) {
  const long m = o.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  std::unordered_map<uint64_t, long> index;
  for (long i = 0; i < m; ++i) index.emplace(shape_code(o.members[i]), i);
  for (long i = 0; i < m; ++i) {
    const Shape& s = o.members[i];
    h(i, i) += violation_count(s);
    h(i, i) += 0.5 * (forward_matches_fullscan(s).size() +
                      backward_matches_fullscan(s).size());
    if (s.active_count() == 1) {
      if (auto fwd = forward(s)) {
        auto it = index.find(shape_code(fwd->first));
        if (it != index.end()) h(i, it->second) += -0.5;
      }
      if (auto bwd = backward(s)) {
        auto it = index.find(shape_code(bwd->first));
        if (it != index.end()) h(i, it->second) += -0.5;
      }
    }
  }
  return h;
}

inline double shape_level_floor(const Orbit& o) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape_level_operator(o));
  return es.eigenvalues()[0];
}

struct SectorBound {
  int orbit_id = 0;
  long size = 0;
  int type = 0;
  double detectable_fraction = 0;
  double exact_min_energy = 0;
  double kitaev_bound = 0;
  double v = 0;
  double theta = 0;
  bool bound_holds = false;
  bool silent = false;  // no member carries any local violation
  double detect_c = 0;  // detectable_fraction >= 1 / (detect_c * n^2 R)
};

// Certify a type-2/3 orbit: exact restricted ground energy of
// Hprop + Hpenalty against the angle bound v * 2 sin^2(theta/2), where the
// null spaces are the uniform-superposition states and the clean-shape span.
//
// Orbits whose members all pass the local checks ("silent" orbits: a lone
// turn/left flag oscillating between the dead and unborn regions) make the
// two null spaces intersect; they are reported with a zero bound and, as the
// exact diagonalization shows, a zero ground energy.
inline SectorBound clairvoyance_check(const Orbit& o, const CanonicalCircuit* c,
                                      int n, int R) {
  if (o.type == 1)
    throw std::invalid_argument("legal sector carries no penalty bound");
  SectorBound out;
  out.orbit_id = o.id;
  out.size = o.size();
  out.type = o.type;
  out.detectable_fraction = o.detectable_fraction;
  out.silent = o.detectable == 0;
  out.detect_c =
      out.silent ? std::numeric_limits<double>::infinity()
                 : 1.0 / (o.detectable_fraction * n * n * R);

  const SectorBasis basis = orbit_basis(o);
  if (basis.dim > kDenseSectorThreshold)
    throw std::length_error(
        "sector dimension exceeds the dense threshold; use the iterative path");
  const Eigen::MatrixXcd a1 = build_hprop(basis, c).to_dense();
  const Eigen::MatrixXcd a2 = build_hpenalty(basis).to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a1 + a2);
  out.exact_min_energy = es.eigenvalues()[0];
  if (out.silent) {
    out.theta = 0;
    out.v = 0;
    out.kitaev_bound = 0;
    out.bound_holds = out.exact_min_energy >= -1e-10;
    return out;
  }
  if (o.detectable == o.size()) {
    // Every member is penalized: the penalty alone floors the energy.
    out.theta = M_PI / 2;
    out.v = smallest_nonzero_eig(a2);
    out.kitaev_bound = out.v;
    out.bound_holds = out.exact_min_energy >= out.kitaev_bound - 1e-10;
    return out;
  }
  const AngleBound ab = kitaev_bound(a1, a2);
  out.kitaev_bound = ab.bound;
  out.v = ab.v;
  out.theta = ab.theta;
  out.bound_holds = ab.verified;
  return out;
}

}  // namespace lineham
