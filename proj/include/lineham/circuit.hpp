#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "lineham/gates.hpp"

namespace lineham {

enum class Role { Witness, Ancilla };

// A circuit in canonical form: R rounds of n-1 nearest-neighbor gates, the
// k-th gate of a round acting on qubits (k, k+1), rounds executed top to
// bottom and gates within a round left to right. The first and last rounds
// are identity-only; they are reserved for input and output checking.
struct CanonicalCircuit {
  int n = 2;
  std::vector<std::vector<Gate>> rounds;
  std::vector<Role> roles;
  int out_index = 2;  // 1-based qubit index of the output

  int R() const { return static_cast<int>(rounds.size()); }
  long K() const {
    return static_cast<long>(n) * (2 * n + 3) * (R() - 1) + n - 1;
  }
  int chain_length() const { return n * R(); }

  void validate() const {
    if (n < 2) throw std::invalid_argument("need n >= 2 qubits");
    if (R() < 2) throw std::invalid_argument("need R >= 2 rounds");
    for (const auto& r : rounds)
      if (static_cast<int>(r.size()) != n - 1)
        throw std::invalid_argument("each round must hold n-1 gates");
    for (const Gate& g : rounds.front())
      if (!g.is_identity())
        throw std::invalid_argument("first round must contain only identity gates");
    for (const Gate& g : rounds.back())
      if (!g.is_identity())
        throw std::invalid_argument("last round must contain only identity gates");
    if (static_cast<int>(roles.size()) != n)
      throw std::invalid_argument("need one role tag per qubit");
    if (out_index < 1 || out_index > n)
      throw std::invalid_argument("output qubit index out of range");
  }
};

inline std::vector<Role> default_roles(int n) {
  std::vector<Role> r(n, Role::Ancilla);
  r[0] = Role::Witness;
  return r;
}

inline CanonicalCircuit make_circuit(int n, std::vector<std::vector<Gate>> rounds,
                                     std::optional<std::vector<Role>> roles = {},
                                     std::optional<int> out = {}) {
  CanonicalCircuit c;
  c.n = n;
  c.rounds = std::move(rounds);
  c.roles = roles ? *roles : default_roles(n);
  c.out_index = out ? *out : n;
  c.validate();
  return c;
}

// All-identity circuit with R rounds.
inline CanonicalCircuit identity_circuit(int n, int R,
                                         std::optional<std::vector<Role>> roles = {},
                                         std::optional<int> out = {}) {
  std::vector<std::vector<Gate>> rounds(R, std::vector<Gate>(n - 1));
  return make_circuit(n, std::move(rounds), std::move(roles), out);
}

struct RawGate {
  Gate gate;
  int qubit;  // 1-based; acts on (qubit, qubit+1)
};

// Pack an ordered gate list into rounds, preserving execution order, then
// wrap with the identity first and last rounds.
inline CanonicalCircuit canonicalize(const std::vector<RawGate>& raw, int n,
                                     std::optional<std::vector<Role>> roles = {},
                                     std::optional<int> out = {}) {
  if (n < 2) throw std::invalid_argument("need n >= 2 qubits");
  std::vector<std::vector<Gate>> packed;
  std::vector<bool> used;
  int max_slot = 0;
  auto open_round = [&] {
    packed.emplace_back(n - 1);
    used.assign(n - 1, false);
    max_slot = 0;
  };
  for (size_t g = 0; g < raw.size(); ++g) {
    const int k = raw[g].qubit;
    if (k < 1 || k + 1 > n)
      throw std::invalid_argument(
          "gate " + std::to_string(g) + " does not act on an adjacent pair in range");
    if (packed.empty() || used[k - 1] || k < max_slot) open_round();
    packed.back()[k - 1] = raw[g].gate;
    used[k - 1] = true;
    max_slot = k;
  }
  std::vector<std::vector<Gate>> rounds;
  rounds.emplace_back(n - 1);
  for (auto& r : packed) rounds.push_back(std::move(r));
  rounds.emplace_back(n - 1);
  return make_circuit(n, std::move(rounds), std::move(roles), out);
}

struct StateVector {
  int n = 0;
  Eigen::VectorXcd amp;

  StateVector() = default;
  StateVector(int qubits, Eigen::VectorXcd a) : n(qubits), amp(std::move(a)) {
    if (amp.size() != (1L << n))
      throw std::invalid_argument("state dimension must be 2^n");
    if (std::abs(amp.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("state must be unit norm");
  }

  static StateVector basis(int qubits, long z) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(1L << qubits);
    a[z] = 1.0;
    return StateVector(qubits, std::move(a));
  }
};

// Qubit 1 is the most significant bit of the basis index.
inline int qubit_bit(int n, long z, int qubit) {
  return static_cast<int>((z >> (n - qubit)) & 1);
}

inline void apply_gate_inplace(Eigen::VectorXcd& amp, int n, int k,
                               const Matrix4& u) {
  const long dim = amp.size();
  const int sh_hi = n - k;      // left qubit of the pair
  const int sh_lo = n - k - 1;  // right qubit
  for (long z = 0; z < dim; ++z) {
    if (((z >> sh_hi) & 1) || ((z >> sh_lo) & 1)) continue;
    long idx[4];
    for (int b = 0; b < 4; ++b)
      idx[b] = z | (static_cast<long>((b >> 1) & 1) << sh_hi) |
               (static_cast<long>(b & 1) << sh_lo);
    Eigen::Vector4cd v;
    for (int b = 0; b < 4; ++b) v[b] = amp[idx[b]];
    Eigen::Vector4cd w = u * v;
    for (int b = 0; b < 4; ++b) amp[idx[b]] = w[b];
  }
}

// Reference simulator: rounds in order, gates within a round left to right.
inline StateVector apply_circuit(const CanonicalCircuit& c,
                                 const StateVector& input) {
  if (input.n != c.n) throw std::invalid_argument("state/circuit dimension mismatch");
  Eigen::VectorXcd amp = input.amp;
  for (const auto& round : c.rounds)
    for (int k = 1; k <= c.n - 1; ++k)
      apply_gate_inplace(amp, c.n, k, round[k - 1].m);
  const double norm = amp.norm();
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::logic_error("simulator lost normalization");
  return StateVector(c.n, std::move(amp));
}

// Full unitary of the circuit, for small n.
inline Eigen::MatrixXcd circuit_unitary(const CanonicalCircuit& c) {
  const long dim = 1L << c.n;
  Eigen::MatrixXcd u(dim, dim);
  for (long z = 0; z < dim; ++z) {
    u.col(z) = apply_circuit(c, StateVector::basis(c.n, z)).amp;
  }
  return u;
}

// Probability that the output qubit reads 1. The input must carry |0> on
// every ancilla qubit.
inline double acceptance_probability(const CanonicalCircuit& c,
                                     const StateVector& input) {
  if (input.n != c.n) throw std::invalid_argument("state/circuit dimension mismatch");
  const long dim = input.amp.size();
  for (int qb = 1; qb <= c.n; ++qb) {
    if (c.roles[qb - 1] != Role::Ancilla) continue;
    double mass = 0;
    for (long z = 0; z < dim; ++z)
      if (qubit_bit(c.n, z, qb)) mass += std::norm(input.amp[z]);
    if (mass > 1e-12)
      throw std::invalid_argument("ancilla qubit " + std::to_string(qb) +
                                  " is not |0>");
  }
  const StateVector out = apply_circuit(c, input);
  double p = 0;
  for (long z = 0; z < dim; ++z)
    if (qubit_bit(c.n, z, c.out_index)) p += std::norm(out.amp[z]);
  return p;
}

// --- circuit file format ------------------------------------------------
//
// {"n": int, "rounds": [[gate, ...], ...], "roles": [...], "out": int}
// where a gate is a built-in name or a 4x4 matrix of [re, im] pairs.

inline Gate gate_from_json(const nlohmann::json& j) {
  if (j.is_string()) return gates::by_name(j.get<std::string>());
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("gate must be a name or a 4x4 matrix");
  Matrix4 m;
  for (int r = 0; r < 4; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != 4)
      throw std::invalid_argument("gate matrix row must hold 4 entries");
    for (int col = 0; col < 4; ++col) {
      const auto& e = row[col];
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("gate entry must be an [re, im] pair");
      m(r, col) = cd(e[0].get<double>(), e[1].get<double>());
    }
  }
  return Gate(m);
}

inline nlohmann::json gate_to_json(const Gate& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 4; ++c)
      row.push_back({g.m(r, c).real(), g.m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline CanonicalCircuit circuit_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  std::vector<std::vector<Gate>> rounds;
  for (const auto& round : j.at("rounds")) {
    std::vector<Gate> r;
    for (const auto& g : round) r.push_back(gate_from_json(g));
    rounds.push_back(std::move(r));
  }
  std::optional<std::vector<Role>> roles;
  if (j.contains("roles")) {
    std::vector<Role> rs;
    for (const auto& t : j.at("roles")) {
      const std::string s = t.get<std::string>();
      if (s == "witness") rs.push_back(Role::Witness);
      else if (s == "ancilla") rs.push_back(Role::Ancilla);
      else throw std::invalid_argument("role must be witness or ancilla");
    }
    roles = std::move(rs);
  }
  std::optional<int> out;
  if (j.contains("out")) out = j.at("out").get<int>();
  return make_circuit(n, std::move(rounds), std::move(roles), out);
}

inline nlohmann::json circuit_to_json(const CanonicalCircuit& c) {
  nlohmann::json j;
  j["n"] = c.n;
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& round : c.rounds) {
    nlohmann::json r = nlohmann::json::array();
    for (const Gate& g : round)
      r.push_back(g.is_identity() ? nlohmann::json("I") : gate_to_json(g));
    rounds.push_back(r);
  }
  j["rounds"] = rounds;
  nlohmann::json roles = nlohmann::json::array();
  for (Role r : c.roles)
    roles.push_back(r == Role::Witness ? "witness" : "ancilla");
  j["roles"] = roles;
  j["out"] = c.out_index;
  return j;
}

inline CanonicalCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  nlohmann::json j;
  in >> j;
  return circuit_from_json(j);
}

}  // namespace lineham
