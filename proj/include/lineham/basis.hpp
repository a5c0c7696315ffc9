#pragma once

#include <unordered_map>

#include "lineham/rules.hpp"
#include "lineham/shape.hpp"

namespace lineham {

// Basis over a set of shapes: shape-major in render order, data-minor with
// one bit per 2-dim site, leftmost site most significant.
struct SectorBasis {
  Alphabet alphabet = Alphabet::Twelve;
  int n = 0;
  int L = 0;
  std::vector<Shape> shapes;                 // sorted
  std::vector<int> qbits;                    // data bit count per shape
  std::vector<long> offset;                  // shapes.size() + 1 entries
  long dim = 0;
  std::unordered_map<uint64_t, int> index_of;

  int shape_index(const Shape& s) const {
    auto it = index_of.find(shape_code(s));
    return it == index_of.end() ? -1 : it->second;
  }
  long global_index(int shape_idx, long data) const {
    return offset[shape_idx] + data;
  }
  // rank of a site among the shape's 2-dim sites, or -1
  int bit_rank(int shape_idx, int site) const {
    const Shape& s = shapes[shape_idx];
    if (sym_data_dim(s.sym[site]) != 2) return -1;
    int r = 0;
    for (int i = 0; i < site; ++i)
      if (sym_data_dim(s.sym[i]) == 2) ++r;
    return r;
  }
  static int bit_of(long data, int q, int rank) {
    return static_cast<int>((data >> (q - 1 - rank)) & 1);
  }
};

inline SectorBasis make_basis(std::vector<Shape> shapes) {
  if (shapes.empty()) throw std::invalid_argument("empty shape set");
  std::sort(shapes.begin(), shapes.end());
  shapes.erase(std::unique(shapes.begin(), shapes.end()), shapes.end());
  SectorBasis b;
  b.alphabet = shapes.front().alphabet;
  b.n = shapes.front().n;
  b.L = shapes.front().size();
  b.shapes = std::move(shapes);
  b.offset.resize(b.shapes.size() + 1, 0);
  b.qbits.resize(b.shapes.size());
  b.index_of.reserve(b.shapes.size() * 2);
  for (size_t i = 0; i < b.shapes.size(); ++i) {
    const Shape& s = b.shapes[i];
    if (s.alphabet != b.alphabet || s.n != b.n || s.size() != b.L)
      throw std::invalid_argument("mixed shape parameters in one basis");
    b.qbits[i] = s.data_bits();
    b.offset[i + 1] = b.offset[i] + (1L << b.qbits[i]);
    b.index_of.emplace(shape_code(s), static_cast<int>(i));
  }
  b.dim = b.offset.back();
  return b;
}

// All shapes of the alphabet for a given chain, optionally restricted to the
// single-active-site sector (the only shapes the transition rules can move).
enum class EnumerationScope { Full, SingleActive };

template <typename F>
void for_each_shape(int n, int R, Alphabet al, EnumerationScope scope, F&& f) {
  const int L = n * R;
  if (scope == EnumerationScope::Full) {
    const auto& syms = alphabet_symbols(al);
    const uint64_t radix = syms.size();
    uint64_t total = 1;
    for (int i = 0; i < L; ++i) total *= radix;
    Shape sh(al, n, std::vector<Sym>(L, syms[0]));
    for (uint64_t code = 0; code < total; ++code) {
      uint64_t c = code;
      for (int i = 0; i < L; ++i) {
        sh.sym[i] = syms[c % radix];
        c /= radix;
      }
      f(sh);
    }
    return;
  }
  static const Sym actives[4] = {Sym::GateF, Sym::RightF, Sym::LeftF,
                                 Sym::TurnF};
  std::vector<Sym> inactives;
  for (Sym s : alphabet_symbols(al))
    if (!sym_active(s)) inactives.push_back(s);
  const uint64_t m = inactives.size();
  uint64_t total = 1;
  for (int i = 0; i < L - 1; ++i) total *= m;
  Shape sh(al, n, std::vector<Sym>(L, inactives[0]));
  for (int pos = 0; pos < L; ++pos)
    for (Sym act : actives)
      for (uint64_t code = 0; code < total; ++code) {
        uint64_t c = code;
        for (int i = 0; i < L; ++i) {
          if (i == pos) {
            sh.sym[i] = act;
          } else {
            sh.sym[i] = inactives[c % m];
            c /= m;
          }
        }
        f(sh);
      }
}

inline SectorBasis enumeration_basis(int n, int R, Alphabet al,
                                     EnumerationScope scope) {
  std::vector<Shape> shapes;
  for_each_shape(n, R, al, scope, [&](const Shape& s) { shapes.push_back(s); });
  return make_basis(std::move(shapes));
}

}  // namespace lineham
