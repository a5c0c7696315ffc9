#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lineham/adiabatic.hpp"

using namespace lineham;

namespace {

Gate random_gate(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix4> qr(a);
  Matrix4 q = qr.householderQ();
  Matrix4 r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 4; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return Gate(q);
}

CanonicalCircuit random_circuit(int n, int R, std::mt19937_64& rng) {
  std::vector<std::vector<Gate>> rounds(R, std::vector<Gate>(n - 1));
  for (int r = 1; r + 1 < R; ++r)
    for (int k = 0; k < n - 1; ++k) rounds[r][k] = random_gate(rng);
  return make_circuit(n, std::move(rounds));
}

CanonicalCircuit bell_circuit() {
  // H on the witness, then CNOT onto the ancilla: R = 3, n = 2.
  std::vector<std::vector<Gate>> rounds{
      {Gate()}, {Gate(gates::cnot().m * gates::on_first(gates::H()).m)}, {Gate()}};
  return make_circuit(2, std::move(rounds));
}

}  // namespace

TEST_CASE("instant quench leaves the state unchanged") {
  LegalSector ls = make_legal_sector(identity_circuit(2, 2));
  Schedule sched;
  sched.T = 0;
  AdiabaticRun run = evolve(ls, sched);
  Eigen::VectorXcd want = Eigen::VectorXcd::Zero(ls.basis.dim);
  want[ls.basis.global_index(ls.step_to_shape[0], 0)] = 1;
  CHECK((run.state - want).norm() == 0.0);
}

TEST_CASE("schedules validate and interpolate") {
  Schedule bad;
  bad.T = 1;
  bad.s_grid = {0.0, 0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Schedule grid;
  grid.T = 2;
  grid.s_grid = {0.0, 0.8, 1.0};
  grid.validate();
  CHECK(grid.s_at(0) == 0.0);
  CHECK(grid.s_at(1) == Catch::Approx(0.8));
  CHECK(grid.s_at(1.5) == Catch::Approx(0.9));
  CHECK(grid.s_at(2) == 1.0);
  Schedule linear;
  linear.T = 4;
  CHECK(linear.s_at(1) == Catch::Approx(0.25));
}

TEST_CASE("the two integrators agree at moderate duration") {
  LegalSector ls = make_legal_sector(bell_circuit());
  Schedule sched;
  sched.T = 64;
  AdiabaticRun a = evolve(ls, sched, nullptr, Integrator::RK4);
  AdiabaticRun b = evolve(ls, sched, nullptr, Integrator::Magnus2);
  CHECK(a.norm_drift <= 1e-8);
  CHECK(b.norm_drift <= 1e-8);
  CHECK((a.state - b.state).norm() <= 1e-4);
  CHECK(a.fidelity == Catch::Approx(b.fidelity).margin(1e-6));
}

TEST_CASE("evolution stays inside the invariant block") {
  // The initial basis input picks one co-moving data block; the final state
  // projected to t = K must carry exactly the circuit output.
  LegalSector ls = make_legal_sector(bell_circuit());
  Schedule sched;
  sched.T = 256;
  AdiabaticRun run = evolve(ls, sched);
  Decoded dec = decode_output(ls, run.state);
  // the Bell distribution appears conditionally even before full adiabaticity
  CHECK(dec.distribution.at("00") == Catch::Approx(0.5).margin(1e-8));
  CHECK(dec.distribution.at("11") == Catch::Approx(0.5).margin(1e-8));
  CHECK(dec.distribution.count("01") + dec.distribution.count("10") == 0);
}

TEST_CASE("fidelity grows with duration and crosses 0.99") {
  LegalSector ls = make_legal_sector(bell_circuit());
  auto sweep = fidelity_sweep(ls, 0.99, 256.0, 14);
  REQUIRE_FALSE(sweep.empty());
  CHECK(sweep.back().fidelity >= 0.99);
  for (size_t i = 1; i < sweep.size(); ++i)
    CHECK(sweep[i].fidelity >= sweep[i - 1].fidelity - 0.02);
  // decoded output of the adiabatically prepared state matches the oracle
  Schedule sched;
  sched.T = sweep.back().T;
  AdiabaticRun run = evolve(ls, sched);
  Decoded dec = decode_output(ls, run.state);
  CHECK(std::abs(dec.distribution.at("00") - 0.5) +
            std::abs(dec.distribution.at("11") - 0.5) <=
        1e-3);
  CHECK(dec.history_fidelity >= 0.99);
}

TEST_CASE("minimum gap scan against the closed forms") {
  LegalSector ls = make_legal_sector(identity_circuit(2, 2));
  GapScan scan = min_gap_scan(ls, 101);
  const long K1 = 16;
  // at s = 0 the restricted operator is diag(0, 1, ..., 1)
  CHECK(scan.samples.front().second == Catch::Approx(1.0).margin(1e-12));
  // at s = 1 it is the path matrix
  CHECK(scan.samples.back().second ==
        Catch::Approx(1 - std::cos(M_PI / K1)).margin(1e-12));
  CHECK(scan.g_min >= 1.0 / (2.0 * K1 * K1));
  CHECK(scan.g_min_refined <= scan.g_min);
  CHECK(std::abs(scan.s_star_refined - scan.s_star) <= 1.0 / 100);
  // the scan is insensitive to the data block chosen
  GapScan other = min_gap_scan(ls, 101, 1);
  CHECK(other.g_min == Catch::Approx(scan.g_min).margin(1e-12));
}

TEST_CASE("decoding the exact history state") {
  std::mt19937_64 rng(61);
  // t = K weight of the exact history state is 1/(K+1)
  LegalSector bell = make_legal_sector(bell_circuit());
  Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(4);
  zeros[0] = 1;
  Eigen::VectorXcd hist = history_state(bell, zeros);
  Decoded dec = decode_output(bell, hist);
  CHECK(dec.t_k_weight == Catch::Approx(1.0 / 30.0).margin(1e-12));
  CHECK(dec.history_fidelity == Catch::Approx(1.0).margin(1e-12));
  CHECK(dec.distribution.at("00") == Catch::Approx(0.5).margin(1e-10));
  CHECK(dec.distribution.at("11") == Catch::Approx(0.5).margin(1e-10));

  // all-identity circuit: the conditional output equals the input exactly
  LegalSector id = make_legal_sector(identity_circuit(2, 2));
  Eigen::VectorXcd in = Eigen::VectorXcd::Zero(4);
  in[0b10] = 1;
  Decoded did = decode_output(id, history_state(id, in));
  CHECK(did.distribution.at("10") == Catch::Approx(1.0).margin(1e-12));

  // 20 random circuits: decoded conditional distribution vs the simulator
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int R = 2 + static_cast<int>(rng() % (n == 2 ? 3 : 2));
    CanonicalCircuit c = random_circuit(n, R, rng);
    LegalSector ls = make_legal_sector(c);
    const long z = static_cast<long>(rng() % (1L << n));
    Decoded d = decode_output(ls, history_state(ls, Eigen::VectorXcd::Unit(1L << n, z)));
    StateVector out = apply_circuit(c, StateVector::basis(n, z));
    double tv = 0;
    for (long w = 0; w < (1L << n); ++w) {
      std::string bits(n, '0');
      for (int j = 0; j < n; ++j) bits[j] = (w >> (n - 1 - j)) & 1 ? '1' : '0';
      const double got = d.distribution.count(bits) ? d.distribution.at(bits) : 0;
      tv += std::abs(got - std::norm(out.amp[w]));
    }
    REQUIRE(tv / 2 <= 1e-6);
  }

  // a state with no weight on the final configuration refuses to decode
  Eigen::VectorXcd early = Eigen::VectorXcd::Zero(id.basis.dim);
  early[id.basis.global_index(id.step_to_shape[0], 0)] = 1;
  CHECK_THROWS_AS(decode_output(id, early), std::runtime_error);
}

TEST_CASE("full-space evolution never leaks out of the legal span") {
  // Spot check at L = 4: evolve each legal basis vector under the full
  // single-active operator pair and measure the mass outside the legal span.
  CanonicalCircuit c = identity_circuit(2, 2);
  SectorBasis basis =
      enumeration_basis(2, 2, Alphabet::Twelve, EnumerationScope::SingleActive);
  LegalSector ls = make_legal_sector(c);
  SparseOperator h0 = build_h0_adiabatic(basis);
  SparseOperator h1 = build_hprop(basis, &c);
  std::vector<long> legal_idx;
  std::vector<char> legal_mask(basis.dim, 0);
  for (size_t si = 0; si < basis.shapes.size(); ++si)
    if (is_legal(basis.shapes[si]))
      for (long d = 0; d < (1L << basis.qbits[si]); ++d) {
        legal_idx.push_back(basis.global_index(si, d));
        legal_mask[basis.global_index(si, d)] = 1;
      }
  Schedule sched;
  sched.T = 8;
  for (long pick : {0L, 17L, 42L}) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dim);
    psi[legal_idx[pick % legal_idx.size()]] = 1;
    EvolveResult ev = evolve_interpolation(h0, h1, sched, std::move(psi));
    double leak = 0;
    for (long i = 0; i < basis.dim; ++i)
      if (!legal_mask[i]) leak += std::norm(ev.state[i]);
    REQUIRE(std::sqrt(leak) <= 1e-6);
  }
}

TEST_CASE("norm drift is tracked and bounded") {
  LegalSector ls = make_legal_sector(identity_circuit(2, 2));
  for (double T : {1.0, 32.0, 512.0}) {
    Schedule sched;
    sched.T = T;
    AdiabaticRun run = evolve(ls, sched);
    REQUIRE(run.norm_drift <= 1e-8);
  }
}
