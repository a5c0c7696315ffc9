#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lineham {

using cd = std::complex<double>;

// Hermitian operator stored as sorted coordinate triplets with CSR row
// pointers. Assemblers insert both (i,j,v) and (j,i,conj v).
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(long dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

  struct Triplet {
    long r, c;
    cd v;
  };

  static SparseOperator from_triplets(long dim, std::vector<Triplet> t) {
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    SparseOperator op(dim);
    op.col_.reserve(t.size());
    op.val_.reserve(t.size());
    for (size_t i = 0; i < t.size();) {
      size_t j = i;
      cd sum = 0;
      while (j < t.size() && t[j].r == t[i].r && t[j].c == t[i].c)
        sum += t[j++].v;
      if (sum != cd(0, 0)) {
        if (t[i].r < 0 || t[i].r >= dim || t[i].c < 0 || t[i].c >= dim)
          throw std::out_of_range("triplet outside the operator dimension");
        op.row_ptr_[t[i].r + 1]++;
        op.col_.push_back(t[i].c);
        op.val_.push_back(sum);
      }
      i = j;
    }
    for (long r = 0; r < dim; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
    return op;
  }

  long dim() const { return dim_; }
  long nnz() const { return static_cast<long>(val_.size()); }

  void matvec(const cd* x, cd* y) const {
    for (long r = 0; r < dim_; ++r) {
      cd acc = 0;
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        acc += val_[k] * x[col_[k]];
      y[r] = acc;
    }
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y(dim_);
    matvec(x.data(), y.data());
    return y;
  }

  Eigen::MatrixXcd to_dense() const {
    if (dim_ > 8192) throw std::length_error("operator too large to densify");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (long r = 0; r < dim_; ++r)
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        m(r, col_[k]) += val_[k];
    return m;
  }

  // max row sum of |entries|; for a Hermitian matrix this bounds the
  // spectral norm.
  double one_norm() const {
    double best = 0;
    for (long r = 0; r < dim_; ++r) {
      double s = 0;
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        s += std::abs(val_[k]);
      best = std::max(best, s);
    }
    return best;
  }

  cd coeff(long r, long c) const {
    for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      if (col_[k] == c) return val_[k];
    return 0;
  }

  bool hermitian(double tol = 1e-12) const {
    for (long r = 0; r < dim_; ++r)
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        if (std::abs(coeff(col_[k], r) - std::conj(val_[k])) > tol)
          return false;
    return true;
  }

  SparseOperator plus(const SparseOperator& o, cd scale_self = 1,
                      cd scale_other = 1) const {
    if (o.dim_ != dim_) throw std::invalid_argument("operator dimension mismatch");
    std::vector<Triplet> t;
    t.reserve(val_.size() + o.val_.size());
    for (long r = 0; r < dim_; ++r) {
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        t.push_back({r, col_[k], scale_self * val_[k]});
      for (long k = o.row_ptr_[r]; k < o.row_ptr_[r + 1]; ++k)
        t.push_back({r, o.col_[k], scale_other * o.val_[k]});
    }
    return from_triplets(dim_, std::move(t));
  }

  template <typename F>
  void for_each(F&& f) const {
    for (long r = 0; r < dim_; ++r)
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        f(r, col_[k], val_[k]);
  }

  // Coordinate text format: header "dim nnz", then one "row col re im" line
  // per entry, row-major, 17 significant digits.
  void save_coo(std::ostream& out) const {
    out << dim_ << " " << nnz() << "\n";
    char buf[128];
    for (long r = 0; r < dim_; ++r)
      for (long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        std::snprintf(buf, sizeof buf, "%ld %ld %.17g %.17g\n", r, col_[k],
                      val_[k].real(), val_[k].imag());
        out << buf;
      }
  }
  void save_coo(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    save_coo(out);
  }

  static SparseOperator load_coo(std::istream& in) {
    long dim, count;
    if (!(in >> dim >> count)) throw std::runtime_error("bad operator header");
    std::vector<Triplet> t(count);
    for (long i = 0; i < count; ++i) {
      double re, im;
      if (!(in >> t[i].r >> t[i].c >> re >> im))
        throw std::runtime_error("bad operator entry");
      t[i].v = cd(re, im);
    }
    return from_triplets(dim, std::move(t));
  }
  static SparseOperator load_coo(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_coo(in);
  }

 private:
  long dim_ = 0;
  std::vector<long> row_ptr_;
  std::vector<long> col_;
  std::vector<cd> val_;
};

// Accumulates Hermitian triplets; diagonal adds are real.
class OperatorBuilder {
 public:
  explicit OperatorBuilder(long dim) : dim_(dim) {}

  void add_diag(long i, double v) { t_.push_back({i, i, cd(v, 0)}); }
  // Adds v at (i, j) and conj(v) at (j, i).
  void add_offdiag(long i, long j, cd v) {
    t_.push_back({i, j, v});
    t_.push_back({j, i, std::conj(v)});
  }
  SparseOperator build() { return SparseOperator::from_triplets(dim_, std::move(t_)); }
  long dim() const { return dim_; }

 private:
  long dim_;
  std::vector<SparseOperator::Triplet> t_;
};

}  // namespace lineham
