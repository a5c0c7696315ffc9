#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <functional>
#include <random>

#include "lineham/sparse.hpp"

namespace lineham {

struct EigResult {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXcd vectors;     // orthonormal columns
  Eigen::VectorXd residuals;    // ||Hv - lambda v|| per pair
};

inline constexpr uint64_t kLanczosSeed = 0x5EED;

inline EigResult smallest_eigs_dense(const Eigen::MatrixXcd& h, int k) {
  if (k < 1 || k > h.rows()) throw std::invalid_argument("bad eigenpair count");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense eigensolver failed");
  EigResult r;
  r.eigenvalues = es.eigenvalues().head(k);
  r.vectors = es.eigenvectors().leftCols(k);
  r.residuals.resize(k);
  for (int i = 0; i < k; ++i)
    r.residuals[i] =
        (h * r.vectors.col(i) - r.eigenvalues[i] * r.vectors.col(i)).norm();
  return r;
}

namespace detail {

// One Lanczos sweep with full reorthogonalization against `ortho` plus the
// Krylov basis itself; returns the smallest Ritz pair.
inline bool lanczos_smallest(
    const std::function<void(const cd*, cd*)>& matvec, long dim,
    const Eigen::MatrixXcd& ortho, const Eigen::VectorXcd& start, double tol,
    int cap, double* value, Eigen::VectorXcd* vector) {
  Eigen::MatrixXcd v(dim, 0);
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w = start;
  auto project_out = [&](Eigen::VectorXcd& x) {
    if (ortho.cols() > 0) x -= ortho * (ortho.adjoint() * x);
    if (v.cols() > 0) x -= v * (v.adjoint() * x);
  };
  project_out(w);
  if (w.norm() < 1e-14) return false;
  w.normalize();
  double best = 0, prev = std::numeric_limits<double>::infinity();
  int stall = 0;
  Eigen::VectorXcd hv(dim);
  for (int j = 0; j < cap; ++j) {
    v.conservativeResize(Eigen::NoChange, j + 1);
    v.col(j) = w;
    matvec(v.col(j).data(), hv.data());
    alpha.push_back(std::real(v.col(j).dot(hv)));
    w = hv;
    project_out(w);
    project_out(w);  // second pass keeps the basis orthogonal
    const double b = w.norm();

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j + 1, j + 1);
    for (int i = 0; i <= j; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 <= j; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    best = es.eigenvalues()[0];
    const double resid_est = b * std::abs(es.eigenvectors().col(0)[j]);
    const bool stalled = std::abs(best - prev) < 1e-14 * std::max(1.0, std::abs(best));
    stall = stalled ? stall + 1 : 0;
    prev = best;
    if (resid_est <= tol || b < 1e-14 || stall >= 64 || j + 1 == cap ||
        j + 1 == dim) {
      Eigen::VectorXcd ritz = v * es.eigenvectors().col(0).cast<cd>();
      ritz.normalize();
      *value = best;
      *vector = ritz;
      return true;
    }
    beta.push_back(b);
    w /= b;
  }
  return false;
}

}  // namespace detail

// k smallest eigenpairs by deflated Lanczos with full reorthogonalization.
// Deterministic: the start vectors come from a fixed-seed generator.
inline EigResult smallest_eigs(const SparseOperator& h, int k,
                               double tol = 1e-10) {
  const long dim = h.dim();
  if (k < 1 || k > dim) throw std::invalid_argument("bad eigenpair count");
  const double scale = std::max(1.0, h.one_norm());
  const int cap =
      static_cast<int>(20 * std::sqrt(static_cast<double>(dim)) + 200);
  std::mt19937_64 rng(kLanczosSeed);
  std::normal_distribution<double> gauss;
  auto matvec = [&h](const cd* x, cd* y) { h.matvec(x, y); };

  EigResult r;
  r.eigenvalues.resize(k);
  r.residuals.resize(k);
  r.vectors.resize(dim, k);
  Eigen::MatrixXcd locked(dim, 0);
  for (int found = 0; found < k; ++found) {
    Eigen::VectorXcd start(dim);
    for (long i = 0; i < dim; ++i) start[i] = cd(gauss(rng), gauss(rng));
    double value;
    Eigen::VectorXcd vec;
    if (!detail::lanczos_smallest(matvec, dim, locked, start, tol * scale, cap,
                                  &value, &vec))
      throw std::runtime_error("eigensolver failed to build a Krylov space");
    const double resid = (h.apply(vec) - value * vec).norm();
    if (resid > 1e-8 * scale)
      throw std::runtime_error(
          "eigensolver did not converge within the iteration cap; best residual " +
          std::to_string(resid));
    r.eigenvalues[found] = value;
    r.residuals[found] = resid;
    r.vectors.col(found) = vec;
    locked.conservativeResize(Eigen::NoChange, found + 1);
    locked.col(found) = vec;
  }
  // Deflation returns values one at a time; present them sorted.
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return r.eigenvalues[a] < r.eigenvalues[b];
  });
  EigResult sorted;
  sorted.eigenvalues.resize(k);
  sorted.residuals.resize(k);
  sorted.vectors.resize(dim, k);
  for (int i = 0; i < k; ++i) {
    sorted.eigenvalues[i] = r.eigenvalues[idx[i]];
    sorted.residuals[i] = r.residuals[idx[i]];
    sorted.vectors.col(i) = r.vectors.col(idx[i]);
  }
  return sorted;
}

// Ground energy and gap to the first distinct level. Eigenvalues within
// 1e-9 * max(1, |H|_1) of each other count as one level, so data degeneracy
// does not read as a vanishing gap.
inline std::pair<double, double> spectral_gap(const Eigen::MatrixXcd& h) {
  if (h.rows() < 2) throw std::invalid_argument("need dimension >= 2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const double tol =
      1e-9 * std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff());
  const double e0 = es.eigenvalues()[0];
  for (long i = 1; i < h.rows(); ++i)
    if (es.eigenvalues()[i] - e0 > tol)
      return {e0, es.eigenvalues()[i] - e0};
  return {e0, 0.0};
}

inline std::pair<double, double> spectral_gap(const SparseOperator& h) {
  if (h.dim() <= 512) return spectral_gap(h.to_dense());
  const double tol = 1e-9 * std::max(1.0, h.one_norm());
  int k = 4;
  while (true) {
    k = std::min<long>(k, h.dim());
    EigResult r = smallest_eigs(h, k);
    for (int i = 1; i < k; ++i)
      if (r.eigenvalues[i] - r.eigenvalues[0] > tol)
        return {r.eigenvalues[0], r.eigenvalues[i] - r.eigenvalues[0]};
    if (k == h.dim()) return {r.eigenvalues[0], 0.0};
    k *= 2;
  }
}

// Angle between subspaces given by orthonormal column bases: cos(theta) is
// the largest singular value of the cross-Gram matrix. Requires trivial
// intersection.
inline double principal_angle(const Eigen::MatrixXcd& a,
                              const Eigen::MatrixXcd& b) {
  if (a.cols() == 0 || b.cols() == 0)
    throw std::invalid_argument("empty subspace basis");
  auto check_orthonormal = [](const Eigen::MatrixXcd& m) {
    const Eigen::MatrixXcd g =
        m.adjoint() * m - Eigen::MatrixXcd::Identity(m.cols(), m.cols());
    if (g.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("subspace basis is not orthonormal");
  };
  check_orthonormal(a);
  check_orthonormal(b);
  const Eigen::MatrixXcd gram = a.adjoint() * b;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
  const double c = svd.singularValues()[0];
  if (c >= 1.0 - 1e-10)
    throw std::invalid_argument("subspaces share a vector; angle undefined");
  return std::acos(std::min(1.0, c));
}

// Null-space basis: eigenvectors below the extraction threshold.
inline Eigen::MatrixXcd null_space_basis(const Eigen::MatrixXcd& h,
                                         double threshold = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  long count = 0;
  while (count < h.rows() && es.eigenvalues()[count] < threshold) ++count;
  return es.eigenvectors().leftCols(count);
}

inline double smallest_nonzero_eig(const Eigen::MatrixXcd& h,
                                   double threshold = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  for (long i = 0; i < h.rows(); ++i)
    if (es.eigenvalues()[i] >= threshold) return es.eigenvalues()[i];
  throw std::invalid_argument("operator has no nonzero eigenvalue");
}

struct AngleBound {
  double bound;      // v * 2 sin^2(theta/2)
  double v;          // smallest nonzero eigenvalue over both operators
  double theta;      // angle between the null spaces
  double min_sum;    // smallest eigenvalue of A1 + A2
  bool verified;     // min_sum >= bound - 1e-10
};

// Lower bound for nonnegative A1, A2 with trivially intersecting null
// spaces: A1 + A2 >= v * 2 sin^2(theta/2).
inline AngleBound kitaev_bound(const Eigen::MatrixXcd& a1,
                               const Eigen::MatrixXcd& a2,
                               double threshold = 1e-10) {
  const Eigen::MatrixXcd n1 = null_space_basis(a1, threshold);
  const Eigen::MatrixXcd n2 = null_space_basis(a2, threshold);
  if (n1.cols() == 0 || n2.cols() == 0)
    throw std::invalid_argument("a null space is trivial; bound not applicable");
  const double theta = principal_angle(n1, n2);  // throws on shared vectors
  const double v = std::min(smallest_nonzero_eig(a1, threshold),
                            smallest_nonzero_eig(a2, threshold));
  AngleBound out;
  out.theta = theta;
  out.v = v;
  out.bound = v * 2.0 * std::pow(std::sin(theta / 2.0), 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a1 + a2);
  out.min_sum = es.eigenvalues()[0];
  out.verified = out.min_sum >= out.bound - 1e-10;
  return out;
}

// Reference tridiagonal of the propagation term on a (K+1)-step path:
// diag(1/2, 1, ..., 1, 1/2) with -1/2 off the diagonal. Eigenvalues are
// 1 - cos(k pi / (K+1)).
inline Eigen::MatrixXd path_matrix(int size) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    m(i, i) = (i == 0 || i == size - 1) ? 0.5 : 1.0;
    if (i + 1 < size) m(i, i + 1) = m(i + 1, i) = -0.5;
  }
  return m;
}

}  // namespace lineham
