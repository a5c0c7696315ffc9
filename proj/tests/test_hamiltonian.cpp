#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lineham/hamiltonian.hpp"
#include "lineham/spectral.hpp"

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

Eigen::VectorXcd random_amp(long dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd a(dim);
  for (long i = 0; i < dim; ++i) a[i] = cd(g(rng), g(rng));
  a.normalize();
  return a;
}

}  // namespace

TEST_CASE("single rule term is a rank-deficient projector pair") {
  // The two-member orbit {E T E E, E L E E} carries exactly one rule
  // instance; its restricted term has eigenvalues {0, 1}.
  SectorBasis basis = make_basis({parse_shape("E T | E E", Alphabet::Twelve),
                                  parse_shape("E L | E E", Alphabet::Twelve)});
  SparseOperator h = build_hprop(basis);
  REQUIRE(basis.dim == 2);
  EigResult r = smallest_eigs_dense(h.to_dense(), 2);
  CHECK(r.eigenvalues[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(r.eigenvalues[1] == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("history states are annihilated by the propagation term") {
  std::mt19937_64 rng(23);
  for (auto al : {Alphabet::Twelve, Alphabet::Nine}) {
    CanonicalCircuit c = random_circuit(2, 2, rng);
    LegalSector ls = make_legal_sector(c, al);
    SparseOperator hprop = build_hprop(ls.basis, &c);
    CHECK(hprop.hermitian());
    Eigen::VectorXcd psi = history_state(ls, random_amp(4, rng));
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);
    CHECK(hprop.apply(psi).norm() <= 1e-12);
  }
  // 13-state: the initial configuration carries a single data bit.
  CanonicalCircuit c13 = random_circuit(2, 2, rng);
  LegalSector ls13 = make_legal_sector(c13, Alphabet::Thirteen);
  SparseOperator hprop13 = build_hprop(ls13.basis, &c13);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2);
  e0[0] = 1;
  CHECK(hprop13.apply(history_state(ls13, e0)).norm() <= 1e-12);
}

TEST_CASE("restriction to the trace span is the exact tridiagonal") {
  std::mt19937_64 rng(29);
  for (auto [n, R] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3},
                                                      {3, 3}}) {
    CanonicalCircuit c = random_circuit(n, R, rng);
    LegalSector ls = make_legal_sector(c);
    const long K = ls.horizon();
    const Eigen::MatrixXd want = path_matrix(K + 1);
    auto mats = restrict_to_history_basis(ls);
    REQUIRE(static_cast<long>(mats.size()) == (1L << n));
    for (const Eigen::MatrixXcd& m : mats) {
      CHECK((m - want.cast<cd>()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((m * Eigen::VectorXcd::Ones(K + 1)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("trace-span matrix elements connect only adjacent steps") {
  std::mt19937_64 rng(31);
  CanonicalCircuit c = random_circuit(2, 2, rng);
  LegalSector ls = make_legal_sector(c);
  auto m = restrict_interpolation(ls, 0).h1;
  for (long t = 0; t < m.rows(); ++t)
    for (long u = 0; u < m.cols(); ++u)
      if (std::abs(t - u) > 1) CHECK(std::abs(m(t, u)) <= 1e-14);
}

TEST_CASE("start-projector term on the trace span is diag(0,1,...,1)") {
  CanonicalCircuit c = identity_circuit(2, 2);
  LegalSector ls = make_legal_sector(c);
  auto ri = restrict_interpolation(ls, 0);
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(16, 16);
  want(0, 0) = 0;
  CHECK((ri.h0 - want).cwiseAbs().maxCoeff() <= 1e-12);
  // With the first input bit set, the whole diagonal is 1.
  auto ri2 = restrict_interpolation(ls, 0b10);
  CHECK((ri2.h0 - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() <=
        1e-12);

  // Full-space values: gate data 0 at the first site has energy 0, data 1
  // has energy 1.
  SparseOperator h0 = build_h0_adiabatic(ls.basis);
  const int si = ls.step_to_shape[0];
  CHECK(h0.coeff(ls.basis.global_index(si, 0), ls.basis.global_index(si, 0)) ==
        cd(0, 0));
  const long d1 = 1L << (ls.basis.qbits[si] - 1);  // leftmost bit set
  CHECK(h0.coeff(ls.basis.global_index(si, d1), ls.basis.global_index(si, d1)) ==
        cd(1, 0));
}

TEST_CASE("input check penalizes a set ancilla under the gate flag") {
  CanonicalCircuit c = identity_circuit(3, 2);  // roles: witness, anc, anc
  SectorBasis basis = enumeration_basis(3, 2, Alphabet::Twelve,
                                        EnumerationScope::SingleActive);
  SparseOperator hinit = build_hinit(basis, c);
  // gate on the witness site: no contribution for any data
  Shape witness_site = parse_shape("G B B | E E E", Alphabet::Twelve);
  const int wi = basis.shape_index(witness_site);
  for (long d = 0; d < 8; ++d)
    CHECK(hinit.coeff(basis.global_index(wi, d), basis.global_index(wi, d)) ==
          cd(0, 0));
  // gate with data 1 on ancilla site 2 is penalized
  Shape anc_site = parse_shape("A G B | E E E", Alphabet::Twelve);
  const int ai = basis.shape_index(anc_site);
  long hits = 0;
  for (long d = 0; d < 8; ++d) {
    const cd v =
        hinit.coeff(basis.global_index(ai, d), basis.global_index(ai, d));
    const int gate_bit = SectorBasis::bit_of(d, 3, 1);
    CHECK(v == (gate_bit ? cd(1, 0) : cd(0, 0)));
    hits += v != cd(0, 0);
  }
  CHECK(hits == 4);

  // A correctly initialized history state has zero input-check energy.
  std::mt19937_64 rng(37);
  CanonicalCircuit rc = random_circuit(3, 2, rng);
  LegalSector ls = make_legal_sector(rc);
  SparseOperator h = build_hinit(ls.basis, rc);
  // witness qubit 1 arbitrary, ancillas |0>
  Eigen::VectorXcd input = Eigen::VectorXcd::Zero(8);
  input[0b000] = std::sqrt(0.4);
  input[0b100] = std::sqrt(0.6);
  Eigen::VectorXcd psi = history_state(ls, input);
  CHECK(std::abs(psi.dot(h.apply(psi))) <= 1e-12);
}

TEST_CASE("output check reads (1 - p) / (K + 1) on history states") {
  // Always-accepting circuit: X onto the output qubit.
  std::vector<std::vector<Gate>> rounds(3, std::vector<Gate>(1));
  rounds[1][0] = gates::on_second(gates::X());
  CanonicalCircuit accept = make_circuit(2, rounds);
  LegalSector ls = make_legal_sector(accept);
  SparseOperator hfinal = build_hfinal(ls.basis, accept);
  Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(4);
  zeros[0] = 1;
  Eigen::VectorXcd psi = history_state(ls, zeros);
  CHECK(std::abs(psi.dot(hfinal.apply(psi))) <= 1e-12);

  // Witness sqrt(0.3)|0> + sqrt(0.7)|1> relayed onto the output by CNOT:
  // p = 0.7, K = 29, expectation 0.3 / 30.
  std::vector<std::vector<Gate>> relay(3, std::vector<Gate>(1));
  relay[1][0] = gates::cnot();
  CanonicalCircuit c = make_circuit(2, relay);
  LegalSector ls2 = make_legal_sector(c);
  SparseOperator h2 = build_hfinal(ls2.basis, c);
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(4);
  w[0b00] = std::sqrt(0.3);
  w[0b10] = std::sqrt(0.7);
  const double got = std::real(history_state(ls2, w)
                                   .dot(h2.apply(history_state(ls2, w))));
  CHECK(got == Catch::Approx(0.3 / 30.0).margin(1e-10));
  CHECK(acceptance_probability(c, StateVector(2, w)) ==
        Catch::Approx(0.7).margin(1e-12));
}

TEST_CASE("penalty term diagonal equals the violation count, exhaustively") {
  SectorBasis basis =
      enumeration_basis(2, 2, Alphabet::Twelve, EnumerationScope::Full);
  SparseOperator hpen = build_hpenalty(basis);
  CHECK(hpen.hermitian());
  for (size_t si = 0; si < basis.shapes.size(); ++si) {
    const double want = violation_count(basis.shapes[si]);
    for (long d = 0; d < (1L << basis.qbits[si]); ++d) {
      const long i = basis.global_index(si, d);
      REQUIRE(hpen.coeff(i, i) == cd(want, 0));
    }
  }
  // Legal shapes carry no penalty; a qdone-dead pair does.
  CHECK(violation_count(parse_shape("G B | E E", Alphabet::Twelve)) == 0);
  CHECK(violation_count(parse_shape("A D | E E", Alphabet::Twelve)) >= 1);
}

TEST_CASE("local pieces are nonnegative with norm at most one") {
  // Spot-check every named term on small enumerations.
  CanonicalCircuit c = identity_circuit(2, 2);
  SectorBasis basis =
      enumeration_basis(2, 2, Alphabet::Twelve, EnumerationScope::SingleActive);
  for (const SparseOperator& h :
       {build_hprop(basis, &c), build_hinit(basis, c), build_hfinal(basis, c),
        build_h0_adiabatic(basis)}) {
    CHECK(h.hermitian());
    EigResult r = smallest_eigs(h, 1);
    CHECK(r.eigenvalues[0] >= -1e-10);
  }
  // Each rule term alone has norm <= 1: its restriction to a connected pair
  // is a projector pair (checked above); penalty terms are 0/1 projectors.
}

TEST_CASE("13-state additions pin the start chain") {
  SectorBasis basis =
      enumeration_basis(2, 2, Alphabet::Thirteen, EnumerationScope::Full);
  SparseOperator extra = build_13state_terms(basis);
  auto diag_of = [&](const std::string& text) {
    const int si = basis.shape_index(parse_shape(text, Alphabet::Thirteen));
    REQUIRE(si >= 0);
    const long i = basis.global_index(si, 0);
    return std::real(extra.coeff(i, i));
  };
  CHECK(diag_of("G E | E E") >= 1.0);   // gate must be followed by start
  CHECK(diag_of("G S | E E") == 0.0);   // the intended initial configuration
  CHECK(diag_of("G S | S E") >= 1.0);   // start beyond the first block
  CHECK(diag_of("A G | E E") == 0.0);   // trace configurations are clean
  CHECK(diag_of("D D | A G") == 0.0);

  // H0 with the additions: unique ground state and gap 1 (diagonal operator).
  SparseOperator h0 = build_h0_adiabatic(basis).plus(extra);
  long zeros = 0;
  double second = std::numeric_limits<double>::infinity();
  for (long i = 0; i < basis.dim; ++i) {
    const double v = std::real(h0.coeff(i, i));
    if (v == 0.0)
      ++zeros;
    else
      second = std::min(second, v);
  }
  CHECK(zeros == 1);
  CHECK(second >= 1.0);

  // The added terms vanish on every trace configuration.
  LegalSector ls = make_legal_sector(identity_circuit(2, 2), Alphabet::Thirteen);
  SparseOperator on_trace = build_13state_terms(ls.basis);
  CHECK(on_trace.nnz() == 0);
}

TEST_CASE("13-state first sweep writes |0> on the fresh qubits") {
  LegalSector ls = make_legal_sector(identity_circuit(3, 2), Alphabet::Thirteen);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(2);
  e0[0] = 1;
  auto data = replay_history_data(ls, e0);
  // After the first sweep (t = n - 1 = 2) the block holds n qubits, all 0.
  CHECK(data[2].size() == 8);
  CHECK(std::abs(data[2][0] - cd(1, 0)) <= 1e-12);
  // And remains a deterministic |0...0> through the identity computation.
  CHECK(std::abs(data.back()[0] - cd(1, 0)) <= 1e-12);
}

TEST_CASE("full operator blocks never leave an orbit and sum correctly") {
  std::mt19937_64 rng(41);
  CanonicalCircuit c = random_circuit(2, 2, rng);
  SectorBasis basis =
      enumeration_basis(2, 2, Alphabet::Twelve, EnumerationScope::Full);
  SparseOperator h = full_h(basis, c);
  CHECK(h.hermitian());
  const SparseOperator sum = build_hprop(basis, &c)
                                 .plus(build_hinit(basis, c))
                                 .plus(build_hfinal(basis, c))
                                 .plus(build_hpenalty(basis));
  std::stringstream sa, sb;
  h.save_coo(sa);
  sum.save_coo(sb);
  CHECK(sa.str() == sb.str());

  // Hermitian PSD on the full enumeration.
  EigResult r = smallest_eigs(h, 1);
  CHECK(r.eigenvalues[0] >= -1e-10);

  // Off-diagonal entries connect equal-shape or single-step-related shapes.
  h.for_each([&](long row, long col, cd) {
    if (row == col) return;
    int sr = 0, sc = 0;
    while (basis.offset[sr + 1] <= row) ++sr;
    while (basis.offset[sc + 1] <= col) ++sc;
    if (sr == sc) return;
    const Shape& a = basis.shapes[sr];
    const Shape& b = basis.shapes[sc];
    bool related = false;
    for (const RuleInstance& m : forward_matches_fullscan(a))
      related |= apply_rule(a, *m.rule, m.site, true) == b;
    for (const RuleInstance& m : backward_matches_fullscan(a))
      related |= apply_rule(a, *m.rule, m.site, false) == b;
    REQUIRE(related);
  });
}

TEST_CASE("legal span is invariant under every interpolated operator") {
  // || (1 - P) H(s) P || = 0 on a 21-point grid, via the single-active
  // enumeration (a rule step never changes the active-site count, so all
  // matrix elements out of legal shapes live inside this enumeration).
  std::mt19937_64 rng(43);
  for (auto [n, R] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}}) {
    CanonicalCircuit c = random_circuit(n, R, rng);
    SectorBasis basis = enumeration_basis(n, R, Alphabet::Twelve,
                                          EnumerationScope::SingleActive);
    LegalSector ls = make_legal_sector(c);
    SparseOperator h0 = build_h0_adiabatic(basis);
    SparseOperator h1 = full_h(basis, c);
    std::vector<char> legal_mask(basis.dim, 0);
    for (size_t si = 0; si < basis.shapes.size(); ++si)
      if (is_legal(basis.shapes[si]))
        for (long d = 0; d < (1L << basis.qbits[si]); ++d)
          legal_mask[basis.global_index(si, d)] = 1;
    long legal_dim = 0;
    for (char m : legal_mask) legal_dim += m;
    REQUIRE(legal_dim == ls.basis.dim);
    for (int gi = 0; gi <= 20; ++gi) {
      const double s = gi / 20.0;
      double worst = 0;
      for (long i = 0; i < basis.dim; ++i) {
        if (!legal_mask[i]) continue;
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(basis.dim);
        e[i] = 1;
        Eigen::VectorXcd y = (1 - s) * h0.apply(e) + s * h1.apply(e);
        double leak = 0;
        for (long j = 0; j < basis.dim; ++j)
          if (!legal_mask[j]) leak += std::norm(y[j]);
        worst = std::max(worst, std::sqrt(leak));
      }
      REQUIRE(worst <= 1e-12);
    }
  }
}

TEST_CASE("operator export is deterministic and re-readable") {
  CanonicalCircuit c = identity_circuit(2, 2);
  LegalSector ls = make_legal_sector(c);
  SparseOperator h = full_h(ls.basis, c);
  std::stringstream a, b;
  h.save_coo(a);
  h.save_coo(b);
  CHECK(a.str() == b.str());
  SparseOperator back = SparseOperator::load_coo(a);
  CHECK((back.to_dense() - h.to_dense()).cwiseAbs().maxCoeff() == 0.0);
}
