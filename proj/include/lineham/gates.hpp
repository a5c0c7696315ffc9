#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace lineham {

using cd = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

// A two-qubit gate on an adjacent pair. Basis order |ab>: the left qubit is
// the most significant bit.
struct Gate {
  Matrix4 m;

  Gate() : m(Matrix4::Identity()) {}
  explicit Gate(const Matrix4& u) : m(u) { check_unitary(); }

  void check_unitary() const {
    const Matrix4 d = m.adjoint() * m - Matrix4::Identity();
    if (d.cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("gate matrix is not unitary");
  }
  bool is_identity(double tol = 1e-12) const {
    return (m - Matrix4::Identity()).cwiseAbs().maxCoeff() <= tol;
  }
  bool operator==(const Gate& o) const { return m == o.m; }
};

namespace gates {

inline Matrix2 I2() { return Matrix2::Identity(); }
inline Matrix2 X() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix2 H() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix2 m;
  m << s, s, s, -s;
  return m;
}
inline Matrix2 T() {
  Matrix2 m;
  m << 1, 0, 0, std::polar(1.0, M_PI / 4);
  return m;
}
inline Matrix2 RY(double theta) {
  Matrix2 m;
  m << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2),
      std::cos(theta / 2);
  return m;
}

inline Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline Gate identity() { return Gate(Matrix4::Identity()); }
inline Gate cnot() {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(1, 1) = 1;
  m(2, 3) = m(3, 2) = 1;
  return Gate(m);
}
inline Gate cz() {
  Matrix4 m = Matrix4::Identity();
  m(3, 3) = -1;
  return Gate(m);
}
inline Gate swap() {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  return Gate(m);
}
inline Gate on_first(const Matrix2& u) { return Gate(kron(u, I2())); }
inline Gate on_second(const Matrix2& u) { return Gate(kron(I2(), u)); }

// Built-in names accepted in circuit files: I, CNOT, CZ, SWAP act on the
// pair; X/H/T act on one qubit of the pair, suffix _1 (default) or _2.
inline Gate by_name(const std::string& name) {
  if (name == "I") return identity();
  if (name == "CNOT") return cnot();
  if (name == "CZ") return cz();
  if (name == "SWAP") return swap();
  auto single = [&](const std::string& base) -> const Matrix2* {
    static const Matrix2 x = X(), h = H(), t = T();
    if (base == "X") return &x;
    if (base == "H") return &h;
    if (base == "T") return &t;
    return nullptr;
  };
  std::string base = name;
  int slot = 1;
  if (name.size() > 2 && name.substr(name.size() - 2) == "_1") {
    base = name.substr(0, name.size() - 2);
  } else if (name.size() > 2 && name.substr(name.size() - 2) == "_2") {
    base = name.substr(0, name.size() - 2);
    slot = 2;
  }
  if (const Matrix2* u = single(base))
    return slot == 1 ? on_first(*u) : on_second(*u);
  throw std::invalid_argument("unknown gate name: " + name);
}

}  // namespace gates
}  // namespace lineham
